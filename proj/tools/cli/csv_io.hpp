#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "twinbeam/error.hpp"
#include "twinbeam/fitting.hpp"
#include "twinbeam/opo_model.hpp"

namespace twinbeam::cli {

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Locale-independent number formatting: shortest round-trip form, or fixed
// with `decimals` digits. Negative zero prints as zero.
std::string format_number(double x);
std::string format_fixed(double x, int decimals);

// Spectrum table: header `freq_hz,linear,db`, dB rounded to 4 decimals.
std::string spectrum_csv(const NoiseSpectrum& spectrum);

// Power table: header `p_pump_mw,p_out_mw`.
std::string power_csv(const PowerDataset& data);

// Readers accept a trailing CR and blank lines. Spectrum files need at least
// the freq_hz and linear columns; a db column, if present, is ignored.
NoiseSpectrum read_spectrum_csv(const std::filesystem::path& path);
PowerDataset read_power_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

// Deferred output: all files are rendered first, then written together.
struct OutputFile {
    std::string path;  // "-" means standard output
    std::string content;
};

}  // namespace twinbeam::cli
