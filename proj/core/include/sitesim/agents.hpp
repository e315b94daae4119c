#pragma once

#include "sitesim/errors.hpp"

namespace sitesim {

enum class AgentKind { Dozer, Dumper };

// Vehicle geometry and kinematic limits. Lab-scale defaults: 60x40 cm robots.
struct AgentSpec {
  AgentKind kind = AgentKind::Dozer;
  double length = 60.0;             // cm, along heading
  double width = 40.0;              // cm
  double speed = 15.0;              // cm/s
  double turn_rate = 0.8;           // rad/s
  double blade_width = 40.0;        // cm, dozer only
  double payload_capacity = 1.0e4;  // cm^3, dumper only

  static AgentSpec dozer() {
    AgentSpec s;
    s.kind = AgentKind::Dozer;
    return s;
  }

  static AgentSpec dumper() {
    AgentSpec s;
    s.kind = AgentKind::Dumper;
    s.speed = 12.0;  // loaded hauler, slower than the dozer
    return s;
  }

  void validate() const {
    if (length <= 0.0 || width <= 0.0 || speed <= 0.0 || turn_rate <= 0.0)
      throw ConfigError("AgentSpec dimensions and rates must be > 0");
    if (kind == AgentKind::Dozer &&
        (blade_width < 0.5 * width || blade_width > 1.5 * width))
      throw ConfigError("blade_width must be within [0.5, 1.5] x width");
    if (kind == AgentKind::Dumper && payload_capacity <= 0.0)
      throw ConfigError("payload_capacity must be > 0");
  }
};

}  // namespace sitesim
