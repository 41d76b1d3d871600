#pragma once

#include <iosfwd>
#include <string>

#include "optomech/simulate.hpp"

namespace optomech {

/// Binary dump, little-endian throughout:
///   "OMTRACE1" | dt f64 | n_samples u64 | n_channels u32 |
///   per channel: name length u32, name bytes, kind u8 (0 real, 1 complex) |
///   channel-major data, complex samples as (re, im) f64 pairs.
void write_trace_binary(const TimeTrace& trace, std::ostream& os);
void write_trace_binary(const TimeTrace& trace, const std::string& path);

/// Reads dt, sample count and channels; the remaining metadata is not stored.
TimeTrace read_trace_binary(std::istream& is);
TimeTrace read_trace_binary(const std::string& path);

/// CSV with a '# units:' comment line, a header row and one row per sample;
/// complex channels become <name>_re, <name>_im.
void write_trace_csv(const TimeTrace& trace, std::ostream& os);
void write_trace_csv(const TimeTrace& trace, const std::string& path);

/// SI unit of a trace channel by name ("V*s", "m", "V").
const char* channel_unit(const std::string& name);

}  // namespace optomech
