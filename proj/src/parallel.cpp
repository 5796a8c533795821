#include "pipescan/parallel.hpp"

#include <atomic>
#include <cstdlib>

#include <omp.h>

namespace pipescan {

namespace {

std::atomic<ExecMode>& mode_slot() {
    static std::atomic<ExecMode> mode = [] {
        const char* env = std::getenv("PIPESCAN_SERIAL");
        return (env && env[0] == '1') ? ExecMode::serial : ExecMode::parallel;
    }();
    return mode;
}

} // namespace

ExecMode exec_mode() { return mode_slot().load(std::memory_order_relaxed); }

void set_exec_mode(ExecMode mode) { mode_slot().store(mode, std::memory_order_relaxed); }

int hardware_threads() { return omp_get_max_threads(); }

} // namespace pipescan
