// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "rbm/error.hpp"
#include "rbm/harness.hpp"

namespace rbm::harness
{

namespace
{

constexpr std::array<char, 8> kMagic{'R', 'B', 'M', 'S', 'M', 'A', 'T', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_u64(std::string &out, std::uint64_t v)
{
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(const char *p)
{
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

void atomic_write(const std::filesystem::path &path, const std::string &contents)
{
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError(IoError::Kind::Open, "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out)
      throw IoError(IoError::Kind::Write, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError(IoError::Kind::Write, "cannot rename '" + tmp.string() + "': " + ec.message());
}

void write_matrix(const std::filesystem::path &path, const Matrix &m)
{
  std::string buf;
  buf.reserve(24 + 8 * static_cast<std::size_t>(m.size()));
  buf.append(kMagic.data(), kMagic.size());
  put_u64(buf, static_cast<std::uint64_t>(m.rows()));
  put_u64(buf, static_cast<std::uint64_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      put_u64(buf, std::bit_cast<std::uint64_t>(m(i, j)));
  atomic_write(path, buf);
}

Matrix read_matrix(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(IoError::Kind::Open, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.size() < kMagic.size() || std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0)
    throw IoError(IoError::Kind::BadMagic, "bad magic in '" + path.string() + "'");
  if (data.size() < 24)
    throw IoError(IoError::Kind::Truncated, "truncated header in '" + path.string() + "'");
  const std::uint64_t rows = get_u64(data.data() + 8);
  const std::uint64_t cols = get_u64(data.data() + 16);
  constexpr std::uint64_t kMaxIndex = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
  if (rows > kMaxIndex || cols > kMaxIndex || (cols != 0 && rows > (kMaxIndex / 8) / cols))
    throw IoError(IoError::Kind::SizeOverflow, "matrix dimensions overflow in '" + path.string() + "'");
  const std::uint64_t payload = rows * cols * 8;
  if (data.size() - 24 < payload)
    throw IoError(IoError::Kind::Truncated, "truncated payload in '" + path.string() + "'");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const char *p = data.data() + 24;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i, p += 8)
      m(i, j) = std::bit_cast<double>(get_u64(p));
  return m;
}

}  // namespace rbm::harness
