#pragma once

#include "dscp/types.hpp"

#include <string>

namespace dscp {

/**
 * Reads a series frame from CSV. The header must contain a time column named
 * `t` (integer steps) or `timestamp` (ISO-8601, seconds resolution), a
 * target column `y`, and optionally feature columns `f1..fn` in order.
 * Malformed rows throw ParseError with the line number; the resulting frame
 * is validated before being returned.
 */
SeriesFrame read_series_csv(const std::string& path);

/** Writes t,y[,f1..fn] rows; the inverse of read_series_csv for integer clocks. */
void write_series_csv(const SeriesFrame& frame, const std::string& path);

/** Parses "YYYY-MM-DD[T ]HH:MM:SS[Z]" to epoch seconds; throws ParseError. */
std::int64_t parse_iso8601(const std::string& text);

}  // namespace dscp
