#pragma once

#include <json.hpp>

#include "gwlife/extended_real.hpp"
#include "gwlife/extinction.hpp"
#include "gwlife/series.hpp"
#include "gwlife/simulator.hpp"
#include "gwlife/spectral.hpp"
#include "gwlife/truncation.hpp"

namespace gwlife {

/// {"finite": x} or "inf".
nlohmann::ordered_json to_json(const ExtendedReal& x);
nlohmann::ordered_json to_json(const SeriesValue& x);
nlohmann::ordered_json to_json(const SpectralReport& r);
nlohmann::ordered_json to_json(const BoundaryValue& b);
nlohmann::ordered_json to_json(const RecurrenceClass& r);
nlohmann::ordered_json to_json(const InvariantSystem& s);
nlohmann::ordered_json to_json(const ExtinctionReport& r);
nlohmann::ordered_json to_json(const SimulationSummary& s);
nlohmann::ordered_json to_json(const RadiusSequence& s);

} // namespace gwlife
