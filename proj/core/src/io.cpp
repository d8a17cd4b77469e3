#include "hsadapt/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace hsadapt {
namespace {

using Bytes = std::vector<unsigned char>;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const Bytes& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const Bytes& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

Bytes slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void dump(const Bytes& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw ParameterError(std::string(what) + " does not fit the 32-bit header field");
  return static_cast<std::uint32_t>(v);
}

struct Header {
  std::uint32_t dims[3] = {0, 0, 0};
  std::uint32_t dtype = 0;
};

// Parses magic + `ndims` extents + dtype; returns the payload sample count.
std::size_t parse_header(const Bytes& bytes, const char (&magic)[5], int ndims, Header& header) {
  const std::size_t header_bytes = 4 + 4 * static_cast<std::size_t>(ndims) + 4;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    if (bytes.size() < 4) throw FormatError(bytes.size(), "truncated magic");
    throw FormatError(0, std::string("bad magic, expected \"") + magic + "\"");
  }
  if (bytes.size() < header_bytes) throw FormatError(bytes.size(), "truncated header");

  std::uint64_t count = 1;
  for (int d = 0; d < ndims; ++d) {
    const std::size_t at = 4 + 4 * static_cast<std::size_t>(d);
    header.dims[d] = get_u32(bytes, at);
    if (header.dims[d] == 0) throw FormatError(at, "zero dimension");
    if (count > std::numeric_limits<std::uint64_t>::max() / header.dims[d])
      throw FormatError(at, "dimension product overflows");
    count *= header.dims[d];
  }
  const std::size_t dtype_at = header_bytes - 4;
  header.dtype = get_u32(bytes, dtype_at);
  if (header.dtype != kDtypeFloat32 && header.dtype != kDtypeFloat64)
    throw FormatError(dtype_at, "unknown dtype tag " + std::to_string(header.dtype));

  const std::uint64_t width = header.dtype == kDtypeFloat32 ? 4 : 8;
  if (count > (std::numeric_limits<std::uint64_t>::max() - header_bytes) / width)
    throw FormatError(4, "payload size overflows");
  const std::uint64_t expected = header_bytes + count * width;
  if (bytes.size() < expected) throw FormatError(bytes.size(), "truncated payload");
  if (bytes.size() > expected) throw FormatError(expected, "unexpected trailing bytes");
  return static_cast<std::size_t>(count);
}

std::vector<double> parse_payload(const Bytes& bytes, std::size_t offset, std::size_t count,
                                  std::uint32_t dtype) {
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v;
    std::size_t at;
    if (dtype == kDtypeFloat32) {
      at = offset + 4 * i;
      v = std::bit_cast<float>(get_u32(bytes, at));
    } else {
      at = offset + 8 * i;
      v = std::bit_cast<double>(get_u64(bytes, at));
    }
    if (!std::isfinite(v)) throw FormatError(at, "non-finite sample");
    values[i] = v;
  }
  return values;
}

}  // namespace

namespace detail {

void write_hsb(const Shape& shape, std::span<const double> data,
               const std::filesystem::path& path) {
  validate_shape(shape);
  if (data.size() != shape.size()) throw DimensionError("write_hsb: data length mismatch");
  Bytes bytes;
  bytes.reserve(kHsbHeaderBytes + 4 * data.size());
  bytes.insert(bytes.end(), {'H', 'S', 'B', '1'});
  put_u32(bytes, checked_u32(shape.height, "height"));
  put_u32(bytes, checked_u32(shape.width, "width"));
  put_u32(bytes, checked_u32(shape.channels, "channels"));
  put_u32(bytes, kDtypeFloat32);
  for (double v : data) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  dump(bytes, path);
}

std::pair<Shape, std::vector<double>> read_hsb(const std::filesystem::path& path) {
  const Bytes bytes = slurp(path);
  Header header;
  const std::size_t count = parse_header(bytes, "HSB1", 3, header);
  Shape shape{header.dims[0], header.dims[1], header.dims[2]};
  return {shape, parse_payload(bytes, kHsbHeaderBytes, count, header.dtype)};
}

}  // namespace detail

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
  if (m.rows() < 1 || m.cols() < 1) throw DimensionError("write_matrix: empty matrix");
  Bytes bytes;
  bytes.reserve(16 + 8 * static_cast<std::size_t>(m.size()));
  bytes.insert(bytes.end(), {'H', 'S', 'M', '1'});
  put_u32(bytes, checked_u32(static_cast<std::size_t>(m.rows()), "rows"));
  put_u32(bytes, checked_u32(static_cast<std::size_t>(m.cols()), "cols"));
  put_u32(bytes, kDtypeFloat64);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_u64(bytes, std::bit_cast<std::uint64_t>(m(i, j)));
  dump(bytes, path);
}

Matrix read_matrix(const std::filesystem::path& path) {
  const Bytes bytes = slurp(path);
  Header header;
  const std::size_t count = parse_header(bytes, "HSM1", 2, header);
  const auto values = parse_payload(bytes, 16, count, header.dtype);
  Matrix m(header.dims[0], header.dims[1]);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = values[k++];
  return m;
}

namespace {

struct Graymap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> samples;  // scaled to [0, 1]
};

Graymap read_pgm(const std::filesystem::path& path) {
  Bytes bytes;
  try {
    bytes = slurp(path);
  } catch (const Error&) {
    throw IngestionError("unreadable file", path);
  }
  std::size_t pos = 0;
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw IngestionError("not a binary graymap (P5)", path);
  pos = 2;

  auto next_token = [&]() -> std::size_t {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      throw IngestionError("malformed graymap header", path);
    std::size_t value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (value > (1u << 30)) throw IngestionError("graymap header value too large", path);
      ++pos;
    }
    return value;
  };

  Graymap g;
  g.width = next_token();
  g.height = next_token();
  const std::size_t maxval = next_token();
  if (g.width == 0 || g.height == 0 || maxval == 0 || maxval > 65535)
    throw IngestionError("invalid graymap dimensions or maxval", path);
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw IngestionError("malformed graymap header", path);
  ++pos;  // single whitespace before the raster

  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  const std::size_t n = g.width * g.height;
  if (bytes.size() - pos < n * sample_bytes) throw IngestionError("truncated raster", path);
  g.samples.resize(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t v;
    if (sample_bytes == 1) {
      v = bytes[pos + i];
    } else {
      v = (static_cast<std::size_t>(bytes[pos + 2 * i]) << 8) | bytes[pos + 2 * i + 1];
    }
    g.samples[i] = static_cast<double>(v) * scale;
  }
  return g;
}

bool has_pgm_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".pgm";
}

}  // namespace

HSImage ingest_band_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IngestionError("not a directory", dir);

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && has_pgm_extension(entry.path())) files.push_back(entry.path());
  if (files.empty()) throw IngestionError("no .pgm band files", dir);
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<double> data;
  std::size_t height = 0, width = 0;
  for (std::size_t b = 0; b < files.size(); ++b) {
    Graymap g = read_pgm(files[b]);
    if (b == 0) {
      height = g.height;
      width = g.width;
      data.reserve(height * width * files.size());
    } else if (g.height != height || g.width != width) {
      throw IngestionError("band dimensions differ from " + files[0].filename().string(),
                           files[b]);
    }
    data.insert(data.end(), g.samples.begin(), g.samples.end());
  }
  return HSImage(Shape{height, width, files.size()}, std::move(data));
}

}  // namespace hsadapt
