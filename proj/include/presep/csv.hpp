#pragma once

#include <filesystem>
#include <string>

#include "presep/types.hpp"

namespace presep {

// RFC-4180 numeric CSV, row-major, 17 significant digits.
void write_csv(const std::filesystem::path &path, const Matrix &m);
std::string to_csv(const Matrix &m);

// Throws IoError with line/column context on malformed input.
Matrix read_csv(const std::filesystem::path &path);
Matrix parse_csv(const std::string &text, const std::string &origin = "<csv>");

} // namespace presep
