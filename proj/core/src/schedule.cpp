#include "wola/schedule.hpp"

#include "wola/error.hpp"

namespace wola {

double learning_rate(const ScheduleSpec& s, int t) {
    if (t < 1) throw invalid_input("learning_rate: t must be >= 1");
    switch (s.kind) {
        case ScheduleSpec::Kind::inverse_step:
            if (!(s.base > 0.0) || s.period < 1) {
                throw invalid_input("inverse_step schedule needs base > 0 and period >= 1");
            }
            return s.base / (1.0 + static_cast<double>(t / s.period));
        case ScheduleSpec::Kind::two_phase:
            if (!(s.hi > 0.0) || !(s.lo > 0.0) || s.switch_step < 1) {
                throw invalid_input("two_phase schedule needs hi, lo > 0 and switch_step >= 1");
            }
            return t <= s.switch_step ? s.hi : s.lo;
        case ScheduleSpec::Kind::constant:
            if (!(s.base > 0.0)) throw invalid_input("constant schedule needs base > 0");
            return s.base;
    }
    throw invalid_input("learning_rate: bad schedule kind");
}

ScheduleSpec::Kind schedule_kind_from_string(const std::string& s) {
    if (s == "inverse_step") return ScheduleSpec::Kind::inverse_step;
    if (s == "two_phase") return ScheduleSpec::Kind::two_phase;
    if (s == "constant") return ScheduleSpec::Kind::constant;
    throw invalid_input("unknown schedule kind: " + s);
}

std::string to_string(ScheduleSpec::Kind k) {
    switch (k) {
        case ScheduleSpec::Kind::inverse_step: return "inverse_step";
        case ScheduleSpec::Kind::two_phase: return "two_phase";
        case ScheduleSpec::Kind::constant: return "constant";
    }
    return "constant";
}

}  // namespace wola
