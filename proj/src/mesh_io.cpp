#include "grasp/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace grasp {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_long(const std::string& s, long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Line cursor over an in-memory text buffer.
class LineReader {
 public:
  explicit LineReader(std::string_view text, std::size_t start = 0) : text_(text), pos_(start) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    line_start_ = pos_;
    const std::size_t nl = text_.find('\n', pos_);
    const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_number() const { return line_no_; }
  std::size_t line_offset() const { return line_start_; }
  std::size_t position() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::size_t line_no_ = 0;
};

[[noreturn]] void fail_line(const std::filesystem::path& path, const LineReader& r,
                            const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(r.line_number()) + " (byte offset " +
                   std::to_string(r.line_offset()) + "): " + msg);
}

[[noreturn]] void fail_offset(const std::filesystem::path& path, std::size_t offset,
                              const std::string& msg) {
  throw ParseError(path.string() + ": byte offset " + std::to_string(offset) + ": " + msg);
}

enum class PlyFormat { Ascii, BinaryLittle, BinaryBig };

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  return std::nullopt;
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Binary reader that reports the byte offset of any failure.
class BinaryCursor {
 public:
  BinaryCursor(const std::string& data, std::size_t pos, bool big_endian,
               const std::filesystem::path& path)
      : data_(data), pos_(pos), big_(big_endian), path_(path) {}

  double read(PlyType t) {
    const std::size_t n = type_size(t);
    if (pos_ + n > data_.size()) {
      fail_offset(path_, pos_, "unexpected end of data (need " + std::to_string(n) +
                                   " bytes, file has " + std::to_string(data_.size()) + ")");
    }
    unsigned char buf[8];
    std::memcpy(buf, data_.data() + pos_, n);
    if (big_ != (std::endian::native == std::endian::big)) std::reverse(buf, buf + n);
    pos_ += n;
    switch (t) {
      case PlyType::Int8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::UInt8: return buf[0];
      case PlyType::Int16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::Int32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::Float32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::Float64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }
  std::size_t position() const { return pos_; }

 private:
  const std::string& data_;
  std::size_t pos_;
  bool big_;
  const std::filesystem::path& path_;
};

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  LineReader reader(text);
  TriangleMesh mesh;
  std::string_view line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) fail_line(path, reader, "vertex needs three coordinates");
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[1 + k], v[k])) fail_line(path, reader, "bad vertex coordinate '" + tok[1 + k] + "'");
      }
      mesh.vertices.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) fail_line(path, reader, "face needs at least three vertices");
      std::vector<int> ids;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const std::string head = tok[k].substr(0, tok[k].find('/'));
        long idx = 0;
        if (!parse_long(head, idx) || idx == 0) fail_line(path, reader, "bad face index '" + tok[k] + "'");
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n) fail_line(path, reader, "face index out of range: " + tok[k]);
        ids.push_back(static_cast<int>(resolved));
      }
      for (std::size_t k = 1; k + 1 < ids.size(); ++k) mesh.faces.push_back({ids[0], ids[k], ids[k + 1]});
    }
    // vn, vt, g, o, s, usemtl, mtllib: ignored
  }
  if (mesh.faces.empty()) throw ParseError(path.string() + ": no faces found");
  return mesh;
}

PlyData load_ply(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  LineReader reader(data);
  std::string_view line;
  if (!reader.next(line) || line != "ply") fail_line(path, reader, "missing 'ply' magic");

  PlyFormat format = PlyFormat::Ascii;
  bool have_format = false;
  std::vector<PlyElement> elements;
  PlyData out;
  bool header_done = false;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail_line(path, reader, "incomplete format line");
      if (tok[1] == "ascii") format = PlyFormat::Ascii;
      else if (tok[1] == "binary_little_endian") format = PlyFormat::BinaryLittle;
      else if (tok[1] == "binary_big_endian") format = PlyFormat::BinaryBig;
      else fail_line(path, reader, "unknown format '" + tok[1] + "'");
      have_format = true;
    } else if (tok[0] == "comment" || tok[0] == "obj_info") {
      if (tok.size() == 5 && tok[1] == "center_of_mass") {
        Vec3 c;
        for (int k = 0; k < 3; ++k) {
          if (!parse_double(tok[2 + k], c[k])) fail_line(path, reader, "bad center_of_mass comment");
        }
        out.center_of_mass = c;
      }
    } else if (tok[0] == "element") {
      long count = 0;
      if (tok.size() != 3 || !parse_long(tok[2], count) || count < 0) {
        fail_line(path, reader, "malformed element line");
      }
      elements.push_back({tok[1], static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail_line(path, reader, "property before any element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = ply_type(tok[2]);
        const auto vt = ply_type(tok[3]);
        if (!ct || !vt) fail_line(path, reader, "unknown list property type");
        prop = {tok[4], *vt, true, *ct};
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t) fail_line(path, reader, "unknown property type '" + tok[1] + "'");
        prop = {tok[2], *t, false, PlyType::UInt8};
      } else {
        fail_line(path, reader, "malformed property line");
      }
      elements.back().properties.push_back(prop);
    } else if (tok[0] == "end_header") {
      header_done = true;
      break;
    } else {
      fail_line(path, reader, "unexpected header keyword '" + tok[0] + "'");
    }
  }
  if (!header_done) fail_offset(path, data.size(), "header has no end_header");
  if (!have_format) fail_offset(path, reader.position(), "header has no format line");

  auto prop_index = [](const PlyElement& e, const std::string& name) -> int {
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
      if (e.properties[i].name == name && !e.properties[i].is_list) return static_cast<int>(i);
    }
    return -1;
  };

  const std::size_t body_start = reader.position();
  LineReader ascii(data, body_start);
  // Body line numbers continue from the header.
  const std::size_t ascii_line_base = reader.line_number();
  BinaryCursor bin(data, body_start, format == PlyFormat::BinaryBig, path);

  for (const auto& el : elements) {
    const int ix = prop_index(el, "x"), iy = prop_index(el, "y"), iz = prop_index(el, "z");
    const int inx = prop_index(el, "nx"), iny = prop_index(el, "ny"), inz = prop_index(el, "nz");
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) {
      fail_offset(path, body_start, "vertex element lacks x/y/z properties");
    }
    const bool has_normals = is_vertex && inx >= 0 && iny >= 0 && inz >= 0;
    for (std::size_t row = 0; row < el.count; ++row) {
      std::vector<double> scalars(el.properties.size(), 0.0);
      std::vector<long> list;
      if (format == PlyFormat::Ascii) {
        std::string_view ln;
        do {
          if (!ascii.next(ln)) {
            throw ParseError(path.string() + ": byte offset " + std::to_string(data.size()) +
                             ": unexpected end of file in element '" + el.name + "' row " +
                             std::to_string(row));
          }
        } while (split_ws(ln).empty());
        const auto tok = split_ws(ln);
        const std::size_t line_no = ascii_line_base + ascii.line_number();
        auto bad = [&](const std::string& msg) {
          throw ParseError(path.string() + ":" + std::to_string(line_no) + " (byte offset " +
                           std::to_string(ascii.line_offset()) + "): " + msg);
        };
        std::size_t t = 0;
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const auto& prop = el.properties[p];
          if (t >= tok.size()) bad("too few values in element '" + el.name + "'");
          if (prop.is_list) {
            long count = 0;
            if (!parse_long(tok[t++], count) || count < 0) bad("bad list count");
            for (long k = 0; k < count; ++k) {
              long v = 0;
              if (t >= tok.size() || !parse_long(tok[t++], v)) bad("bad list entry");
              if (is_face) list.push_back(v);
            }
          } else {
            if (!parse_double(tok[t++], scalars[p])) bad("bad number '" + tok[t - 1] + "'");
          }
        }
      } else {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const auto& prop = el.properties[p];
          if (prop.is_list) {
            const std::size_t at = bin.position();
            const double count = bin.read(prop.count_type);
            if (count < 0 || count > 1e6) fail_offset(path, at, "implausible list count");
            for (long k = 0; k < static_cast<long>(count); ++k) {
              const double v = bin.read(prop.type);
              if (is_face) list.push_back(static_cast<long>(v));
            }
          } else {
            const std::size_t at = bin.position();
            scalars[p] = bin.read(prop.type);
            if (!std::isfinite(scalars[p])) fail_offset(path, at, "non-finite value");
          }
        }
      }
      if (is_vertex) {
        out.vertices.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
        if (has_normals) out.normals.emplace_back(scalars[inx], scalars[iny], scalars[inz]);
      } else if (is_face) {
        for (std::size_t k = 1; k + 1 < list.size(); ++k) {
          out.faces.push_back({static_cast<int>(list[0]), static_cast<int>(list[k]),
                               static_cast<int>(list[k + 1])});
        }
      }
    }
  }
  const auto nv = static_cast<long>(out.vertices.size());
  for (const auto& f : out.faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= nv) {
        throw ParseError(path.string() + ": face references vertex " + std::to_string(idx) +
                         " but only " + std::to_string(nv) + " vertices exist");
      }
    }
  }
  if (out.vertices.empty()) throw ParseError(path.string() + ": no vertices");
  return out;
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << std::setprecision(9);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_ply(const std::filesystem::path& path, const SurfacePointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << "ply\nformat ascii 1.0\n";
  out << std::setprecision(17);
  const Vec3& c = cloud.center_of_mass();
  out << "comment center_of_mass " << c.x() << ' ' << c.y() << ' ' << c.z() << '\n';
  out << "element vertex " << cloud.size() << '\n'
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double nx\nproperty double ny\nproperty double nz\nend_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.point(i);
    const Vec3& n = cloud.normal(i);
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << n.x() << ' ' << n.y() << ' ' << n.z()
        << '\n';
  }
}

SurfacePointCloud load_object(const std::filesystem::path& path,
                              const ObjectLoadOptions& options) {
  const std::string ext = lower_ext(path);
  // Draws more samples until mesh_samples survive the clip, then keeps the
  // first mesh_samples of them.
  auto from_mesh = [&](const TriangleMesh& mesh, const std::optional<Vec3>& com) {
    const std::size_t n = options.mesh_samples;
    std::size_t draw = n;
    for (int attempt = 0;; ++attempt) {
      SurfacePointCloud cloud = sample_mesh(mesh, draw, options.seed);
      if (com) cloud = SurfacePointCloud(cloud.points(), cloud.normals(), *com);
      if (!options.clip_below_z) return cloud;
      const SurfacePointCloud kept = clip_below(cloud, *options.clip_below_z);
      if (kept.size() >= n || attempt == 4) {
        const auto count = static_cast<std::ptrdiff_t>(std::min(n, kept.size()));
        return SurfacePointCloud({kept.points().begin(), kept.points().begin() + count},
                                 {kept.normals().begin(), kept.normals().begin() + count},
                                 kept.center_of_mass());
      }
      draw = draw * n / kept.size() + draw / 20 + 16;
    }
  };
  if (ext == ".obj") return from_mesh(load_obj(path), std::nullopt);
  if (ext == ".ply") {
    PlyData ply = load_ply(path);
    if (!ply.faces.empty()) {
      return from_mesh(TriangleMesh{std::move(ply.vertices), std::move(ply.faces)},
                       ply.center_of_mass);
    }
    std::vector<Vec3> normals = ply.normals.empty()
                                    ? estimate_normals(ply.vertices, options.normal_neighbors)
                                    : std::move(ply.normals);
    try {
      if (ply.center_of_mass) {
        return {std::move(ply.vertices), std::move(normals), *ply.center_of_mass};
      }
      return {std::move(ply.vertices), std::move(normals)};
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  throw ParseError(path.string() + ": unsupported object format (expected .obj or .ply)");
}

}  // namespace grasp
