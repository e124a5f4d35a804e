// MetaImage (.mha/.mhd) reader and writer restricted to 32-bit little-endian
// float payloads. Vector fields use ElementNumberOfChannels = NDims with
// interleaved components. Internal computation is 64-bit; values are cast to
// float on write.

#pragma once

#include <string>

#include "bgreg/image.hpp"

namespace bgreg {

void write_metaimage(const std::string &path, const ScalarImage &img);
void write_metaimage(const std::string &path, const VectorField &f);

ScalarImage read_scalar_metaimage(const std::string &path);
VectorField read_vector_metaimage(const std::string &path);

// Channel count declared in the header, without reading the payload.
int metaimage_channels(const std::string &path);

}  // namespace bgreg
