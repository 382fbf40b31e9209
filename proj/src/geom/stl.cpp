// Copyright 2025 The Aeroprint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeroprint/geom/stl.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace aeroprint::geom {

namespace {

struct RawTriangle {
  float n[3];
  float v[9];
};

TriangleMesh from_raw(const std::vector<RawTriangle>& tris, double scale) {
  TriangleMesh soup;
  soup.vertices.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    const int base = static_cast<int>(soup.vertices.size());
    for (int k = 0; k < 3; ++k)
      soup.vertices.emplace_back(t.v[3 * k] * scale, t.v[3 * k + 1] * scale,
                                 t.v[3 * k + 2] * scale);
    soup.add_face(base, base + 1, base + 2);
  }
  return weld(soup);
}

std::vector<RawTriangle> parse_ascii(std::istream& in) {
  std::vector<RawTriangle> tris;
  std::string tok;
  RawTriangle cur{};
  int vi = 0;
  while (in >> tok) {
    if (tok == "normal") {
      in >> cur.n[0] >> cur.n[1] >> cur.n[2];
    } else if (tok == "vertex") {
      if (vi < 3) in >> cur.v[3 * vi] >> cur.v[3 * vi + 1] >> cur.v[3 * vi + 2];
      ++vi;
    } else if (tok == "endfacet") {
      if (vi == 3) tris.push_back(cur);
      cur = RawTriangle{};
      vi = 0;
    }
  }
  return tris;
}

}  // namespace

TriangleMesh read_stl(const std::string& path, double unit_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_stl: cannot open " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0);
  if (size < 15) throw IoError("read_stl: truncated file " + path);

  // Binary detection by exact record arithmetic; "solid" prefixes lie.
  bool binary = false;
  if (size >= 84) {
    char header[84];
    in.read(header, 84);
    std::uint32_t count;
    std::memcpy(&count, header + 80, 4);
    if (static_cast<std::streamoff>(84) + static_cast<std::streamoff>(count) * 50 == size)
      binary = true;
    in.seekg(0);
  }

  std::vector<RawTriangle> tris;
  if (binary) {
    in.seekg(80);
    std::uint32_t count;
    in.read(reinterpret_cast<char*>(&count), 4);
    tris.resize(count);
    for (auto& t : tris) {
      char rec[50];
      in.read(rec, 50);
      if (!in) throw IoError("read_stl: truncated binary records in " + path);
      std::memcpy(t.n, rec, 12);
      std::memcpy(t.v, rec + 12, 36);
    }
  } else {
    tris = parse_ascii(in);
  }
  if (tris.empty()) throw IoError("read_stl: no triangles in " + path);
  return from_raw(tris, unit_scale);
}

void write_stl(const std::string& path, const TriangleMesh& mesh,
               const StlOptions& options) {
  const double inv = 1.0 / options.unit_scale;
  if (options.binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_stl: cannot open " + path);
    char header[80] = {};
    std::snprintf(header, sizeof(header), "aeroprint binary stl");
    out.write(header, 80);
    const std::uint32_t count = static_cast<std::uint32_t>(mesh.faces.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      char rec[50] = {};
      const Vec3 n = mesh.face_normal(static_cast<int>(f));
      float data[12];
      data[0] = static_cast<float>(n.x());
      data[1] = static_cast<float>(n.y());
      data[2] = static_cast<float>(n.z());
      for (int k = 0; k < 3; ++k) {
        const Vec3& v = mesh.vertices[mesh.faces[f][k]];
        data[3 + 3 * k] = static_cast<float>(v.x() * inv);
        data[4 + 3 * k] = static_cast<float>(v.y() * inv);
        data[5 + 3 * k] = static_cast<float>(v.z() * inv);
      }
      std::memcpy(rec, data, 48);
      out.write(rec, 50);
    }
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("write_stl: cannot open " + path);
  out << "solid aeroprint\n";
  std::ostringstream line;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = mesh.face_normal(static_cast<int>(f));
    out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n"
        << "    outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.vertices[mesh.faces[f][k]];
      out << "      vertex " << v.x() * inv << ' ' << v.y() * inv << ' '
          << v.z() * inv << "\n";
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid aeroprint\n";
}

}  // namespace aeroprint::geom
