#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqs/doqs.hpp"
#include "cqs/effective_hamiltonian.hpp"
#include "cqs/floquet.hpp"
#include "cqs/landscape.hpp"
#include "cqs/protocol.hpp"

namespace cqs {

// %.17g: round-trips every double and keeps output byte-stable.
std::string format_number(double v);

void write_spectrum_csv(std::ostream& os, const FloquetSpectrum& spec);
void write_unfolded_csv(std::ostream& os, const RVector& energies, const PhaseMatch& match);
void write_doqs_csv(std::ostream& os, const DoqsCurve& curve);
void write_raster_csv(std::ostream& os, const Raster& raster);
void write_modes_csv(std::ostream& os, const std::vector<ModePoint>& modes);
void write_protocol_csv(std::ostream& os, const std::vector<ProtocolRecord>& records);

nlohmann::json critical_point_json(const CriticalPoint& c);
nlohmann::json critical_points_json(const std::vector<CriticalPoint>& points);

// "CQSM", uint32 version (1), uint64 rows, uint64 cols, then rows*cols (re, im) float64
// pairs in row-major order, all little-endian.
void write_matrix_binary(std::ostream& os, const CMatrix& m);
CMatrix read_matrix_binary(std::istream& is);

// Writes the whole file or throws IoError.
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace cqs
