#pragma once

#include <iosfwd>
#include <string>

#include "rici/rici_descriptor.hpp"
#include "rici/shape_context.hpp"
#include "rici/spin_image.hpp"

namespace rici {

// Descriptor text formats. Every file starts with one '#' line naming the
// method and its parameters, followed by data rows:
//
//   # rici resolution=64 support_radius=0.3
//   <resolution rows of resolution comma-separated integers, row 0 (lowest beta) first>
//
//   # spin-image resolution=64 support_radius=0.3
//   <same layout, real values>
//
//   # shape-context J=15 K=11 L=12 r_min=0.048 r_max=0.3 columns=j,k,l,value
//   <J*K*L rows "j,k,l,value" in (j, k, l) lexicographic order>
//
// Readers throw DataError on malformed content.

enum class DescriptorKind { Rici, SpinImage, ShapeContext };

std::string to_string(DescriptorKind kind);

/// Kind named by the header line; the stream position is restored.
DescriptorKind peek_descriptor_kind(std::istream& in);

void write_csv(std::ostream& out, const RiciDescriptor& d);
void write_csv(std::ostream& out, const SpinImageDescriptor& d);
void write_csv(std::ostream& out, const ShapeContextDescriptor& d);

RiciDescriptor read_rici_csv(std::istream& in);
SpinImageDescriptor read_spin_image_csv(std::istream& in);
ShapeContextDescriptor read_shape_context_csv(std::istream& in);

/// Binary 8-bit PGM with the highest-beta row on top. RICI counts are clamped
/// to 255; spin images are scaled so their maximum maps to 255.
void write_pgm(std::ostream& out, const RiciDescriptor& d);
void write_pgm(std::ostream& out, const SpinImageDescriptor& d);

}  // namespace rici
