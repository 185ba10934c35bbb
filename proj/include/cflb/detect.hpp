#pragma once

#include "cflb/signal.hpp"
#include "cflb/solvers.hpp"

namespace cflb {

/// Correlation output with its first row-major maximum.
struct ResponseMap {
    Signal2D response;
    Pixel peak_loc;
    double peak_value = 0.0;
};

/// response = idft2(x^ o conj(h^_padded)); image must have the model's outer shape.
ResponseMap correlate(const FilterModel& f, const Signal2D& image);

/// Correlates a spatial filter placed by `mask` over an image of mask.outer shape.
ResponseMap correlate(const Signal2D& h, const MaskSpec& mask, const Signal2D& image);

/// Wraps a response map into a ResponseMap with its peak located.
ResponseMap make_response_map(Signal2D response);

/// Image location of the object the peak responded to: (peak + anchor) mod shape.
Pixel locate(const ResponseMap& r, const MaskSpec& mask);

/// Peak-to-sidelobe ratio with a (2 radius + 1)^2 exclusion square around the peak.
/// Throws DegenerateInput when the sidelobe is empty or has zero variance.
double psr(const ResponseMap& r, int exclusion_radius = 5);

/// ||pred - right|| / ||left - right||.
double normalized_distance(Pixel pred, Pixel right_eye, Pixel left_eye);

}  // namespace cflb
