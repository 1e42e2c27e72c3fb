#pragma once

#include <string>

namespace wola {

/// Learning-rate schedules used by the round loop.
///   inverse_step : base / (1 + floor(t / period))
///   two_phase    : hi while t <= switch_step, lo afterwards
///   constant     : base
struct ScheduleSpec {
    enum class Kind { inverse_step, two_phase, constant };
    Kind kind = Kind::constant;
    double base = 0.1;
    int period = 50;
    double hi = 0.25;
    double lo = 0.025;
    int switch_step = 1500;
};

/// Rate at round t (1-based). Validates positivity of the relevant fields.
double learning_rate(const ScheduleSpec& s, int t);

ScheduleSpec::Kind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleSpec::Kind k);

}  // namespace wola
