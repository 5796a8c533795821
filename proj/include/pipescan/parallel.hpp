#pragma once

// Runtime switch between the serial reference kernels and their OpenMP
// counterparts. Every hot loop in the library exists in both forms; the
// serial form is the reference the parallel form is tested against, and
// bench/kernel_bench times the two side by side.

namespace pipescan {

enum class ExecMode { serial, parallel };

// Process-wide mode, default parallel. Reads PIPESCAN_SERIAL=1 from the
// environment on first use.
ExecMode exec_mode();
void set_exec_mode(ExecMode mode);

inline bool parallel_enabled() { return exec_mode() == ExecMode::parallel; }

int hardware_threads();

} // namespace pipescan
