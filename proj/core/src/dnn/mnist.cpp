#include "approxmul/dnn/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "approxmul/error.hpp"

namespace approxmul::dnn {
namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in, const std::filesystem::path& path) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw FormatError("zlib init failed for " + path.string());
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> buf(1 << 16);
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("gzip stream corrupt in " + path.string() + " at input offset " +
                        std::to_string(zs.total_in));
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    if (rc != Z_STREAM_END && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw FormatError("gzip stream truncated in " + path.string());
    }
  }
  inflateEnd(&zs);
  return out;
}

std::vector<std::uint8_t> read_idx_bytes(const std::filesystem::path& path) {
  auto raw = read_all(path);
  if (raw.size() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b) return gunzip(raw, path);
  return raw;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off, const std::filesystem::path& path) {
  if (off + 4 > b.size())
    throw FormatError(path.string() + ": truncated header at offset " + std::to_string(off));
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
         std::uint32_t{b[off + 3]};
}

void put_be32(std::ofstream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>((v >> 16) & 0xFF),
                     static_cast<char>((v >> 8) & 0xFF), static_cast<char>(v & 0xFF)};
  os.write(b, 4);
}

}  // namespace

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, size());
  begin = std::min(begin, end);
  Dataset d;
  d.rows = rows;
  d.cols = cols;
  d.pixels.assign(pixels.begin() + static_cast<std::ptrdiff_t>(begin * image_size()),
                  pixels.begin() + static_cast<std::ptrdiff_t>(end * image_size()));
  d.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin), labels.begin() + static_cast<std::ptrdiff_t>(end));
  return d;
}

Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto ib = read_idx_bytes(images);
  const auto lb = read_idx_bytes(labels);

  const auto imagic = be32(ib, 0, images);
  if (imagic != kIdxImageMagic)
    throw FormatError(images.string() + ": bad image magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", imagic);
      return std::string(buf);
    }());
  const auto lmagic = be32(lb, 0, labels);
  if (lmagic != kIdxLabelMagic) throw FormatError(labels.string() + ": bad label magic");

  const std::size_t n = be32(ib, 4, images);
  const std::size_t rows = be32(ib, 8, images);
  const std::size_t cols = be32(ib, 12, images);
  const std::size_t nl = be32(lb, 4, labels);
  if (n != nl)
    throw FormatError("image/label count mismatch: " + std::to_string(n) + " images, " + std::to_string(nl) +
                      " labels");
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) throw FormatError(images.string() + ": bad dimensions");

  const std::size_t need = 16 + n * rows * cols;
  if (ib.size() < need)
    throw FormatError(images.string() + ": truncated at offset " + std::to_string(ib.size()) + ", expected " +
                      std::to_string(need) + " bytes");
  if (lb.size() < 8 + n)
    throw FormatError(labels.string() + ": truncated at offset " + std::to_string(lb.size()) + ", expected " +
                      std::to_string(8 + n) + " bytes");

  Dataset d;
  d.rows = rows;
  d.cols = cols;
  d.pixels.assign(ib.begin() + 16, ib.begin() + static_cast<std::ptrdiff_t>(need));
  d.labels.assign(lb.begin() + 8, lb.begin() + static_cast<std::ptrdiff_t>(8 + n));
  for (std::size_t i = 0; i < n; ++i)
    if (d.labels[i] > 9)
      throw FormatError(labels.string() + ": label " + std::to_string(d.labels[i]) + " at offset " +
                        std::to_string(8 + i) + " outside 0..9");
  return d;
}

MnistSplits load_mnist_dir(const std::filesystem::path& dir) {
  auto find = [&](const std::string& stem) {
    for (const auto& cand : {stem, stem + ".gz"}) {
      const auto p = dir / cand;
      if (std::filesystem::exists(p)) return p;
    }
    throw FormatError("MNIST file " + stem + " not found in " + dir.string());
  };
  return {load_mnist(find("train-images-idx3-ubyte"), find("train-labels-idx1-ubyte")),
          load_mnist(find("t10k-images-idx3-ubyte"), find("t10k-labels-idx1-ubyte"))};
}

void write_idx(const Dataset& data, const std::filesystem::path& images, const std::filesystem::path& labels) {
  std::ofstream is(images, std::ios::binary | std::ios::trunc);
  std::ofstream ls(labels, std::ios::binary | std::ios::trunc);
  if (!is || !ls) throw FormatError("cannot write IDX files");
  put_be32(is, kIdxImageMagic);
  put_be32(is, static_cast<std::uint32_t>(data.size()));
  put_be32(is, static_cast<std::uint32_t>(data.rows));
  put_be32(is, static_cast<std::uint32_t>(data.cols));
  is.write(reinterpret_cast<const char*>(data.pixels.data()), static_cast<std::streamsize>(data.pixels.size()));
  put_be32(ls, kIdxLabelMagic);
  put_be32(ls, static_cast<std::uint32_t>(data.size()));
  ls.write(reinterpret_cast<const char*>(data.labels.data()), static_cast<std::streamsize>(data.labels.size()));
  if (!is || !ls) throw FormatError("IDX write failed");
}

}  // namespace approxmul::dnn
