#pragma once

#include <string>

namespace qcbridge {

// "%.17g": every double round-trips. Non-finite values become "nan"/"inf".
std::string format_double17(double value);

}  // namespace qcbridge
