#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "cloudcast/error.hpp"
#include "cloudcast/simd.hpp"
#include "kernels.hpp"

namespace cloudcast {

namespace detail {

#ifndef CLOUDCAST_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(CLOUDCAST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* table_for(SimdBackend backend) {
    switch (backend) {
        case SimdBackend::scalar: return &scalar_kernels();
        case SimdBackend::avx2: return cpu_has_avx2() ? avx2_kernels() : nullptr;
    }
    return nullptr;
}

SimdBackend initial_backend() {
    if (const char* env = std::getenv("CLOUDCAST_SIMD")) {
        const std::string_view want(env);
        if (want == "scalar") return SimdBackend::scalar;
        if (want == "avx2" && table_for(SimdBackend::avx2)) return SimdBackend::avx2;
    }
    return table_for(SimdBackend::avx2) ? SimdBackend::avx2 : SimdBackend::scalar;
}

std::atomic<SimdBackend>& current() {
    static std::atomic<SimdBackend> backend{initial_backend()};
    return backend;
}

}  // namespace

const KernelTable& active_kernels() { return *table_for(current().load()); }

}  // namespace detail

std::string_view backend_name(SimdBackend backend) {
    switch (backend) {
        case SimdBackend::scalar: return "scalar";
        case SimdBackend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_available(SimdBackend backend) { return detail::table_for(backend) != nullptr; }

SimdBackend active_backend() { return detail::current().load(); }

void set_backend(SimdBackend backend) {
    if (!backend_available(backend)) {
        throw InvalidInput("SIMD backend '" + std::string(backend_name(backend)) +
                           "' is not available on this machine");
    }
    detail::current().store(backend);
}

}  // namespace cloudcast
