#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "pemda/errors.hpp"
#include "pemda/state.hpp"

namespace pemda {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'E', 'M', 'S', 'N', 'A', 'P', '1'};

template <typename T>
void put_le(std::vector<char>& buf, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf.push_back(static_cast<char>(bits & 0xFFu));
    bits >>= 8;
  }
}

template <typename T>
T get_le(const std::vector<char>& buf, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  if (pos + sizeof(U) > buf.size()) throw IoError("snapshot truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  }
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const PemState& s) {
  const Grid& g = s.grid();
  std::vector<char> buf(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nz()));
  put_le<double>(buf, g.L1());
  put_le<double>(buf, g.L2());
  put_le<double>(buf, s.time);
  for (const SpectralField* f : {&s.u.x, &s.u.y, &s.b.x, &s.b.y}) {
    for (double v : transform_to_physical(*f).values) put_le<double>(buf, v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open snapshot for writing: {}", path.string()));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(fmt::format("failed writing snapshot: {}", path.string()));
}

PemState read_snapshot(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open snapshot: {}", path.string()));
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kMagic.size() || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError(fmt::format("{}: not a PEMSNAP1 file", path.string()));
  }
  std::size_t pos = kMagic.size();
  const auto nx = get_le<std::uint32_t>(buf, pos);
  const auto ny = get_le<std::uint32_t>(buf, pos);
  const auto nz = get_le<std::uint32_t>(buf, pos);
  const double L1 = get_le<double>(buf, pos);
  const double L2 = get_le<double>(buf, pos);
  const double time = get_le<double>(buf, pos);
  const Grid g(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz), L1, L2, dealias_fraction);
  const std::size_t expected = pos + 4 * g.physical_size() * sizeof(double);
  if (buf.size() != expected) {
    throw IoError(fmt::format("{}: expected {} bytes, found {}", path.string(), expected, buf.size()));
  }
  auto read_field = [&] {
    PhysicalField f(g);
    for (double& v : f.values) v = get_le<double>(buf, pos);
    return transform_to_spectral(f, Parity::Even);
  };
  PemState s = PemState::zero(g, time);
  s.u.x = read_field();
  s.u.y = read_field();
  s.b.x = read_field();
  s.b.y = read_field();
  return s;
}

}  // namespace pemda
