// Minimal library walkthrough: lower the 3x3 Gaussian blur kernel onto one
// crossbar column, run a single MAC on a bright patch, and print the cost
// summary against an 8-bit bit-sliced baseline.

#include <iostream>

#include "freqbar/freqbar.hpp"

int main() {
    using namespace freqbar;

    const Kernel kernel{3, 3, {1, 2, 1, 2, 4, 2, 1, 2, 1}, 16};
    const auto& table = ConductanceTable::builtin();
    const CrossbarProgram program = compile(kernel, table, AmplitudeLaw{});

    std::cout << "cell -> (weight, state, freq_hz, g_ms):\n";
    for (const auto& c : program.cells)
        std::cout << "  " << c.index << " -> (" << c.weight << ", " << to_string(c.state) << ", " << c.freq_hz
                  << ", " << c.g_ms << ")\n";

    const std::vector<int> patch(9, 255);
    const PulseSchedule schedule = encode_inputs(program, patch);
    const SimResult result = mac_simulate(program, schedule);
    std::cout << "peak current: analytic " << result.i_peak_analytic_ma << " mA, simulated "
              << result.i_peak_simulated_ma << " mA at t = " << result.t_peak_s << " s\n";
    std::cout << "decoded dot product: " << decode_dot(result.i_peak_simulated_ma, program) << '\n';

    const std::vector<double> amplitudes(9, program.law.v_hi);
    write_cost_csv(compare_baseline(program, 8, amplitudes), std::cout);
    return 0;
}
