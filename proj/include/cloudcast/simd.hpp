#pragma once

#include <string_view>

namespace cloudcast {

/// Inner-loop kernel implementations. Every backend produces bit-identical
/// results to `scalar`: kernels evaluate the same expression tree per output
/// sample and the build disables floating-point contraction.
enum class SimdBackend { scalar, avx2 };

std::string_view backend_name(SimdBackend backend);

/// True when the backend was compiled in and the running CPU supports it.
bool backend_available(SimdBackend backend);

/// Backend used by all library operations. Chosen at first use: the widest
/// available backend, unless CLOUDCAST_SIMD=scalar|avx2 is set in the environment.
SimdBackend active_backend();

/// Throws InvalidInput if the backend is unavailable on this machine.
void set_backend(SimdBackend backend);

}  // namespace cloudcast
