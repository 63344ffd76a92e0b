#include "cqs/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cqs/errors.hpp"

namespace cqs {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_spectrum_csv(std::ostream& os, const FloquetSpectrum& spec) {
  os << "index,phase,residual\n";
  for (Index i = 0; i < spec.phases.size(); ++i)
    os << i << ',' << format_number(spec.phases(i)) << ',' << format_number(spec.residuals(i)) << '\n';
}

void write_unfolded_csv(std::ostream& os, const RVector& energies, const PhaseMatch& match) {
  os << "index,ET,folded_phase,match_residual\n";
  for (Index i = 0; i < energies.size(); ++i)
    os << i << ',' << format_number(energies(i)) << ',' << format_number(fold(energies(i))) << ','
       << format_number(match.distance(i)) << '\n';
}

void write_doqs_csv(std::ostream& os, const DoqsCurve& curve) {
  os << "phi,rho,method\n";
  const char* tag = to_string(curve.method);
  for (Index i = 0; i < curve.grid.size(); ++i)
    os << format_number(curve.grid(i)) << ',' << format_number(curve.values(i)) << ',' << tag << '\n';
}

void write_raster_csv(std::ostream& os, const Raster& raster) {
  os << "Q,P,E\n";
  for (int ip = 0; ip < raster.n; ++ip)
    for (int iq = 0; iq < raster.n; ++iq) {
      const double e = raster.at(iq, ip);
      if (std::isnan(e)) continue;
      os << format_number(raster.q(iq)) << ',' << format_number(raster.p(ip)) << ',' << format_number(e) << '\n';
    }
}

void write_modes_csv(std::ostream& os, const std::vector<ModePoint>& modes) {
  os << "index,ET,Jx\n";
  for (size_t i = 0; i < modes.size(); ++i)
    os << i << ',' << format_number(modes[i].energy) << ',' << format_number(modes[i].jx) << '\n';
}

void write_protocol_csv(std::ostream& os, const std::vector<ProtocolRecord>& records) {
  os << "branch,mirrored,Q,P,E_T,Jx_avg,L,drift\n";
  for (const auto& r : records)
    os << to_string(r.branch) << ',' << (r.mirrored ? 1 : 0) << ',' << format_number(r.r0.q) << ','
       << format_number(r.r0.p) << ',' << format_number(r.energy) << ',' << format_number(r.jx_avg) << ','
       << r.periods << ',' << format_number(r.drift) << '\n';
}

nlohmann::json critical_point_json(const CriticalPoint& c) {
  return {{"Q", c.q},
          {"P", c.p},
          {"X", c.x},
          {"Y", c.y},
          {"Z", c.z},
          {"kind", to_string(c.kind)},
          {"E_G_T", c.energy},
          {"E_c_T", c.extensive_energy},
          {"phi_c", c.phase},
          {"beta", c.beta},
          {"hessian", {c.hessian(0, 0), c.hessian(0, 1), c.hessian(1, 1)}},
          {"det_MG", c.det_mg},
          {"amplitude", c.amplitude},
          {"on_boundary", c.on_boundary}};
}

nlohmann::json critical_points_json(const std::vector<CriticalPoint>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : points) arr.push_back(critical_point_json(c));
  return arr;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw IoError("read_matrix_binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_matrix_binary(std::ostream& os, const CMatrix& m) {
  os.write("CQSM", 4);
  put_le<std::uint32_t>(os, 1);
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      put_le<double>(os, m(r, c).real());
      put_le<double>(os, m(r, c).imag());
    }
  if (!os) throw IoError("write_matrix_binary: stream failure");
}

CMatrix read_matrix_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CQSM", 4) != 0) throw IoError("read_matrix_binary: bad magic");
  if (get_le<std::uint32_t>(is) != 1) throw IoError("read_matrix_binary: unsupported version");
  const auto rows = get_le<std::uint64_t>(is), cols = get_le<std::uint64_t>(is);
  if (rows > (1u << 20) || cols > (1u << 20)) throw IoError("read_matrix_binary: implausible shape");
  CMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const double re = get_le<double>(is);
      const double im = get_le<double>(is);
      m(r, c) = cplx(re, im);
    }
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace cqs
