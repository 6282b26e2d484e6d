#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roughflow/field.hpp"

namespace roughflow {

/// Value kind tag stored in the binary container header.
enum class ValueKind : std::uint32_t { real = 0, complex = 1, vector = 2 };

/// In-memory image of one binary container.
///
/// Layout (little-endian):
///   char[8]  magic "RFLOWBIN"
///   u32      version (1)
///   u32      dim
///   u32      N (points per axis)
///   u32      kind (0 real, 1 complex, 2 vector)
///   u32      components per node (1, 2, or the vector width)
///   u64      snapshot count S
///   f64[S]   snapshot times
///   f64[S * N^dim * components]  payload, snapshot-major, row-major nodes,
///                                node components contiguous
struct FieldContainer {
    std::uint32_t dim = 1;
    std::uint32_t points_per_axis = 16;
    ValueKind kind = ValueKind::real;
    std::uint32_t components = 1;
    std::vector<double> times;
    std::vector<double> payload;

    std::size_t node_count() const;
};

inline constexpr std::uint32_t kContainerVersion = 1;

void write_container(const std::filesystem::path& path, const FieldContainer& c);
FieldContainer read_container(const std::filesystem::path& path);

/// Packs snapshots: kind real stores real parts, complex stores (re, im).
FieldContainer pack_snapshots(const std::vector<ScalarField>& snapshots, const std::vector<double>& times,
                              ValueKind kind);
std::vector<ScalarField> unpack_snapshots(const FieldContainer& c);

/// CSV of one field: header "x,y,re,im" (or "x,re,im" in 1-D), one row per node.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

/// Generic CSV table writer; numbers are written with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace roughflow
