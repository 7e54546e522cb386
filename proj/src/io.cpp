#include "tslab/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace tslab {

TriMeshd read_obj(std::istream& in) {
  std::vector<double> v;
  std::vector<int> f;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw IoError("obj line " + std::to_string(lineno) + ": bad vertex");
      v.insert(v.end(), {x, y, z});
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ss >> tok) {
        const int idx = std::stoi(tok.substr(0, tok.find('/')));
        poly.push_back(idx > 0 ? idx - 1 : int(v.size() / 3) + idx);
      }
      if (poly.size() < 3) throw IoError("obj line " + std::to_string(lineno) + ": face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) f.insert(f.end(), {poly[0], poly[k], poly[k + 1]});
    }
  }
  VertexMatrix<double> V = Eigen::Map<VertexMatrix<double>>(v.data(), Eigen::Index(v.size() / 3), 3);
  FaceMatrix F = Eigen::Map<FaceMatrix>(f.data(), Eigen::Index(f.size() / 3), 3);
  return TriMeshd(std::move(V), std::move(F));
}

TriMeshd read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_obj(in);
}

void write_obj(const TriMeshd& m, std::ostream& out) {
  out << std::setprecision(17);
  const auto& V = m.vertices();
  const auto& F = m.faces();
  for (Eigen::Index i = 0; i < V.rows(); ++i) out << "v " << V(i, 0) << ' ' << V(i, 1) << ' ' << V(i, 2) << '\n';
  for (Eigen::Index i = 0; i < F.rows(); ++i) out << "f " << F(i, 0) + 1 << ' ' << F(i, 1) + 1 << ' ' << F(i, 2) + 1 << '\n';
}

void write_obj(const TriMeshd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_obj(m, out);
}

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), std::streamsize(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

}  // namespace tslab
