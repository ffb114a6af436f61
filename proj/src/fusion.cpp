#include <algorithm>
#include <chrono>
#include <thread>

#include "eoagent/agents.hpp"
#include "eoagent/error.hpp"

using nlohmann::json;

namespace eoa {

std::string decision_template(const json& evidence);  // agents.cpp

double specialist_event_area(const SpecialistReport& report) {
  double area = 0.0;
  for (const auto& t : report.tool_results) {
    if (report.specialist == Specialist::wildfire) {
      area = std::max(area, t.metric("active_fire_area_km2"));
    } else {
      area = std::max(area, t.metric("flood_area_km2"));
    }
  }
  return area;
}

FusionOutcome fuse_rules(const std::optional<HypothesisReport>& hypothesis,
                         const std::vector<SpecialistReport>& reports, const FusionOptions& options) {
  FusionOutcome out;

  // Largest confirmed area per event type.
  std::optional<double> wildfire_area;
  std::optional<double> flood_area;
  bool past_event = false;
  for (const auto& r : reports) {
    if (r.classification == Classification::event_confirmed) {
      auto& slot = r.specialist == Specialist::wildfire ? wildfire_area : flood_area;
      slot = std::max(slot.value_or(0.0), specialist_event_area(r));
    } else if (r.classification == Classification::past_event) {
      past_event = true;
    }
  }

  if (wildfire_area || flood_area) {
    out.decision = Decision::alert;
    out.rules.push_back("confirmation");
    if (wildfire_area && flood_area) {
      out.rules.push_back("multi_event_tiebreak");
      out.event_type = *flood_area > *wildfire_area ? EventType::flood : EventType::wildfire;
    } else {
      out.event_type = wildfire_area ? EventType::wildfire : EventType::flood;
    }
  } else {
    out.decision = Decision::no_alert;
    out.event_type = EventType::none;
    if (past_event) {
      out.rules.push_back("past_event");
      if (options.promote_past_event) {
        out.decision = Decision::alert;
        out.event_type = EventType::wildfire;
        out.informational = true;
        out.rules.push_back("past_event_promoted");
      }
    }
    const bool suspected = hypothesis && hypothesis->predicted_event != EventType::none;
    if (suspected) {
      out.rules.push_back(reports.empty() ? "no_evidence" : "refutation");
    } else {
      out.rules.push_back(reports.empty() ? "nothing_routed" : "no_event_reported");
    }
  }

  // Agreement ratio over the hypothesis (when present) and every routed report.
  auto report_event = [&](const SpecialistReport& r) {
    if (r.classification == Classification::event_confirmed) return event_of(r.specialist);
    if (r.classification == Classification::past_event && out.informational) return EventType::wildfire;
    return EventType::none;
  };
  out.sources = reports.size() + (hypothesis ? 1 : 0);
  if (hypothesis && hypothesis->predicted_event == out.event_type) ++out.agreeing;
  for (const auto& r : reports) {
    if (report_event(r) == out.event_type) ++out.agreeing;
  }
  out.confidence = out.sources == 0 ? 1.0
                                    : static_cast<double>(out.agreeing) / static_cast<double>(out.sources);
  return out;
}

FinalAlert decision_fuse(const std::optional<HypothesisReport>& hypothesis,
                         const std::vector<SpecialistReport>& reports, const AgentToolkit& toolkit) {
  const auto& s = toolkit.settings;
  const FusionOutcome outcome = fuse_rules(hypothesis, reports, s.fusion);
  const double delay = s.costs.delay_ms(s.costs.decision, nullptr, s.thresholds);
  if (delay > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));

  FinalAlert alert;
  if (hypothesis) {
    alert.scene_id = hypothesis->scene_id;
  } else if (!reports.empty()) {
    alert.scene_id = reports.front().scene_id;
  }
  alert.decision = outcome.decision;
  alert.event_type = outcome.event_type;
  alert.confidence = outcome.confidence;
  alert.informational = outcome.informational;
  alert.rules = outcome.rules;
  alert.hypothesis = hypothesis;
  alert.specialist_reports = reports;

  json evidence{{"scene_id", alert.scene_id},
                {"decision", std::string(to_string(alert.decision))},
                {"event_type", std::string(to_string(alert.event_type))},
                {"confidence", alert.confidence},
                {"rules", alert.rules},
                {"hypothesis", hypothesis ? json(*hypothesis) : json(nullptr)},
                {"specialist_reports", reports}};
  // The backend writes prose only; the decision fields above are final.
  try {
    alert.reasoning = call_reasoner(toolkit.reasoner, AgentRole::decision, evidence).reasoning;
  } catch (const Error& e) {
    alert.reasoning = decision_template(evidence) + " (reasoner unavailable: " + e.what() + ")";
  }
  return alert;
}

}  // namespace eoa
