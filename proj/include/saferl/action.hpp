#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace saferl {

enum class LongCmd { Maintain, Accelerate, Brake, HardBrake };
enum class LatCmd { Keep, Left, Right };

// The 8-member discrete action set. Lane changes pair only with maintain or
// brake; the id <-> decomposition table below is fixed and part of every
// serialized artifact (logs, datasets, checkpoints), so it must never change.
//
//   id | longitudinal | lateral
//   ---+--------------+--------
//    0 | maintain     | keep
//    1 | accelerate   | keep
//    2 | brake        | keep
//    3 | hard-brake   | keep
//    4 | maintain     | left
//    5 | brake        | left
//    6 | maintain     | right
//    7 | brake        | right
class Action {
  public:
    static constexpr int kCount = 8;

    constexpr Action() : id_(0) {}
    explicit constexpr Action(int id) : id_(id) {
        if (id < 0 || id >= kCount) throw std::invalid_argument("action id out of range");
    }

    constexpr int id() const { return id_; }

    constexpr LongCmd longitudinal() const {
        constexpr std::array<LongCmd, kCount> table = {
            LongCmd::Maintain, LongCmd::Accelerate, LongCmd::Brake, LongCmd::HardBrake,
            LongCmd::Maintain, LongCmd::Brake,      LongCmd::Maintain, LongCmd::Brake};
        return table[id_];
    }

    constexpr LatCmd lateral() const {
        constexpr std::array<LatCmd, kCount> table = {
            LatCmd::Keep, LatCmd::Keep, LatCmd::Keep, LatCmd::Keep,
            LatCmd::Left, LatCmd::Left, LatCmd::Right, LatCmd::Right};
        return table[id_];
    }

    // Inverse of the table; combinations outside the 8-member set get nullopt.
    static constexpr std::optional<Action> from_parts(LongCmd lon, LatCmd lat) {
        for (int i = 0; i < kCount; ++i) {
            Action a(i);
            if (a.longitudinal() == lon && a.lateral() == lat) return a;
        }
        return std::nullopt;
    }

    friend constexpr bool operator==(Action a, Action b) { return a.id_ == b.id_; }
    friend constexpr bool operator!=(Action a, Action b) { return a.id_ != b.id_; }

  private:
    int id_;
};

inline constexpr Action kMaintainKeep{0};
inline constexpr Action kAccelerateKeep{1};
inline constexpr Action kBrakeKeep{2};
inline constexpr Action kHardBrakeKeep{3};

inline std::string to_string(LongCmd c) {
    switch (c) {
        case LongCmd::Maintain: return "maintain";
        case LongCmd::Accelerate: return "accelerate";
        case LongCmd::Brake: return "brake";
        case LongCmd::HardBrake: return "hard_brake";
    }
    return "?";
}

inline std::string to_string(LatCmd c) {
    switch (c) {
        case LatCmd::Keep: return "keep";
        case LatCmd::Left: return "left";
        case LatCmd::Right: return "right";
    }
    return "?";
}

inline std::string to_string(Action a) {
    return to_string(a.longitudinal()) + "+" + to_string(a.lateral());
}

}  // namespace saferl
