#pragma once

// Umbrella header: frequency-programmed binary-memristor crossbar simulation.

#include "freqbar/analysis.hpp"
#include "freqbar/compiler.hpp"
#include "freqbar/crossbar.hpp"
#include "freqbar/device.hpp"
#include "freqbar/errors.hpp"
#include "freqbar/image.hpp"
#include "freqbar/pipeline.hpp"
#include "freqbar/rng.hpp"
#include "freqbar/waveform.hpp"
