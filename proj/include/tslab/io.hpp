#pragma once

#include "tslab/mesh.hpp"

#include <iosfwd>
#include <string>

namespace tslab {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ASCII OBJ: `v x y z` and `f i j k` records (1-based, optional /vt/vn suffixes
/// ignored). Polygons are fan-triangulated.
TriMeshd read_obj(const std::string& path);
TriMeshd read_obj(std::istream& in);
/// 17 significant digits so a round trip is exact.
void write_obj(const TriMeshd& mesh, const std::string& path);
void write_obj(const TriMeshd& mesh, std::ostream& out);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace tslab
