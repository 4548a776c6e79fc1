#pragma once

#include <stdexcept>
#include <string>

#include "dmtk/tensor.hpp"

namespace dmtk {

/// Binary dense-tensor container, format "DNT1":
///
///   bytes 0..3   magic "DNT1"
///   u32          version (currently 1)
///   u32          N, number of modes
///   u64 * N      extents I_0..I_{N-1}
///   f64 * I      payload in the natural linearization
///
/// All integers and doubles little-endian. Round-trips are bit-exact.
class TensorFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_tensor(const std::string& path, const DenseTensor& tensor);
DenseTensor read_tensor(const std::string& path);

}  // namespace dmtk
