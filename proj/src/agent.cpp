#include "gridbench/agent.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gridbench/controller.hpp"
#include "gridbench/navigation.hpp"

namespace gridbench {

namespace {

// Closest approach the controller aims for when an action has no standoff;
// near targets read better and manipulation is easier.
constexpr double kPreferredApproach = 0.25;
constexpr double kSearchMaskRadius = 1.0;  // searched-and-missed neighborhood

struct Agent {
  WorldGrid world;
  SubtaskPlan plan;
  const CategoryRegistry& reg;
  EpisodeOptions opt;
  PhysicalConstraints effective;  // offsets zeroed under the ablation

  AgentPose pose;
  EpisodeState state;
  SemanticMap map;
  InflatedGrid inflated;
  CollocationMatrix uniform;
  const CollocationMatrix* colloc = nullptr;
  Rng rng;

  Observation obs;
  std::vector<uint8_t> seen_category;
  std::vector<uint8_t> search_mask;
  size_t mask_subtask = SIZE_MAX;

  EpisodeRun run;
  int no_action_streak = 0;

  Agent(const WorldGrid& w, const SubtaskPlan& p, const CategoryRegistry& r,
        const EpisodeOptions& o)
      : world(w),
        plan(p),
        reg(r),
        opt(o),
        effective(o.constraints),
        rng(derive_seed(o.agent_seed, w.seed)) {
    if (opt.ablation.no_interaction_offset)
      effective.interaction_offsets.clear();
    pose = world.spawn;
    map = opt.omniscient ? ground_truth_map(world, reg) : make_map(world, reg);
    inflated = inflate(map, inflation_radius());
    if (!opt.colloc && !opt.random_search) {
      uniform = uniform_matrix(reg);
      colloc = &uniform;
    } else {
      colloc = opt.colloc;
    }
    seen_category.assign(static_cast<size_t>(reg.count()), 0);
    search_mask.assign(static_cast<size_t>(world.width) * world.height, 0);
  }

  double inflation_radius() const {
    return opt.ablation.inflation_radius >= 0 ? opt.ablation.inflation_radius
                                              : opt.constraints.agent_radius;
  }

  void sense() {
    obs = observe(world, pose, effective.sensor);
    update_map(map, obs);
    if (map.obstacle_retracted) {
      inflated = inflate(map, inflation_radius());
      map.obstacle_retracted = false;
    } else {
      inflate_update(inflated, map);
    }
    for (const auto& vi : obs.instances) {
      if (!seen_category[static_cast<size_t>(vi.category)]) {
        seen_category[static_cast<size_t>(vi.category)] = 1;
        if (!plan.pairs.empty() &&
            vi.category == plan.pairs.front().object_category &&
            run.first_sighting_step < 0)
          run.first_sighting_step = state.steps;
      }
    }
  }

  Outcome act(const Action& a) {
    const Outcome out = step(world, pose, state, a, effective, reg, &plan);
    if (a.kind == ActionKind::MoveAhead) {
      if (out == Outcome::Ok)
        run.path_length_m += kMoveStep;
      else
        ++run.collisions;
    } else if (out == Outcome::Failed) {
      ++run.interaction_failures;
    }
    if (opt.keep_trace)
      run.trace.push_back(TraceEntry{state.steps, a, out == Outcome::Ok, pose});
    hash_step(a, out);
    if (state.terminal == Terminal::Running) sense();
    no_action_streak = 0;
    return out;
  }

  void hash_step(const Action& a, Outcome out) {
    char buf[64];
    const int n = std::snprintf(
        buf, sizeof buf, "%d|%s|%d|%d|%.3f|%.3f|%d|%d\n", state.steps,
        to_string(a.kind), a.target, out == Outcome::Ok ? 1 : 0, pose.x,
        pose.y, pose.heading_deg, pose.pitch_deg);
    run.trace_hash = fnv1a(buf, static_cast<size_t>(n), run.trace_hash);
  }

  // One action of progress toward a goal cell; nullopt means the lattice
  // cannot get any closer (arrived).
  std::optional<Action> navigate_toward(const Cell& goal) {
    const PathPlan route = route_plan(inflated, pose.cell(), goal,
                                      pose.heading_deg);
    if (route.actions.empty()) return std::nullopt;
    return route.actions.front();
  }

  void mask_disk(const Cell& center, double radius) {
    const int r = static_cast<int>(radius / kCellSize) + 1;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell c{center.x + dx, center.y + dy};
        if (c.x < 0 || c.x >= world.width || c.y < 0 || c.y >= world.height)
          continue;
        if (within_radius(dx, dy, radius))
          search_mask[map.index(c)] = 1;
      }
  }

  // Cells occupied by the "destination" category of the current goal: object
  // instances already delivered there must not be picked up again.
  std::vector<uint8_t> exclusion_cells(int target_category) {
    std::vector<uint8_t> excl(static_cast<size_t>(world.width) * world.height,
                              0);
    for (const auto& g : plan.goals) {
      if (g.object_category != target_category) continue;
      if (g.kind != GoalKind::On && g.kind != GoalKind::OnCount &&
          g.kind != GoalKind::OnObject)
        continue;
      if (g.at_category < 0) continue;
      for (uint32_t idx : map.marks[static_cast<size_t>(g.at_category)])
        excl[idx] = 1;
      for (const auto& vi : obs.instances)
        if (vi.category == g.at_category)
          for (const auto& c : vi.cells) excl[map.index(c)] = 1;
    }
    return excl;
  }

  // select_planner with delivered-instance filtering for pickup subtasks.
  PlannerChoice select(int target_category, ActionKind act_kind) {
    const bool filter = act_kind == ActionKind::PickupObject;
    const std::vector<uint8_t> excl =
        filter ? exclusion_cells(target_category) : std::vector<uint8_t>();

    const VisibleInstance* best = nullptr;
    for (const auto& vi : obs.instances) {
      if (vi.category != target_category) continue;
      if (filter && !excl.empty() && excl[map.index(vi.cell)]) continue;
      if (!best || vi.horizontal_m < best->horizontal_m)
        best = &vi;
    }
    PlannerChoice choice;
    if (best) {
      choice.kind = PlannerKind::LocalAdjustment;
      choice.target_instance = best->id;
      return choice;
    }

    Cell nearest{};
    double best_d = 1e18;
    bool found = false;
    for (uint32_t idx : map.marks[static_cast<size_t>(target_category)]) {
      if (filter && !excl.empty() && excl[idx]) continue;
      const Cell c{static_cast<int>(idx % map.width),
                   static_cast<int>(idx / map.width)};
      const double dx = cell_center(c.x) - pose.x;
      const double dy = cell_center(c.y) - pose.y;
      const double d = dx * dx + dy * dy;
      if (d < best_d - kDistanceEps) {
        best_d = d;
        nearest = c;
        found = true;
      }
    }
    if (found) {
      choice.kind = PlannerKind::MapLookup;
      choice.goal = nearest;
      return choice;
    }
    choice.kind = PlannerKind::SemanticSearch;
    return choice;
  }

  // True when the sensed state already satisfies the pair's action.
  bool redundant(const VisibleInstance& vi, ActionKind k) const {
    switch (k) {
      case ActionKind::OpenObject: return vi.is_landmark && vi.open;
      case ActionKind::CloseObject: return vi.is_landmark && !vi.open;
      case ActionKind::ToggleObjectOn: return vi.toggled_on;
      case ActionKind::ToggleObjectOff:
        return vi.is_landmark && !vi.toggled_on;
      default: return false;
    }
  }

  double target_height(const VisibleInstance& vi) const {
    // Landmarks expose their interaction surface; for small objects the
    // resting surface is unknown to the agent, so assume table height.
    return vi.is_landmark ? reg.at(vi.category).surface_height : 0.75;
  }

  void subtask_bookkeeping(size_t idx) {
    if (idx != mask_subtask) {
      std::fill(search_mask.begin(), search_mask.end(), 0);
      mask_subtask = idx;
    }
  }

  void finish_failure_mode() {
    if (state.terminal == Terminal::Success) return;
    if (state.terminal == Terminal::FailureLimit) {
      run.failure_mode = run.collisions > run.interaction_failures
                             ? "collision"
                             : "interaction_failure";
      return;
    }
    // Step limit or stall: diagnose the pending subtask.
    const auto idx = current_subtask(plan);
    if (!idx) {
      run.failure_mode = "other";
      return;
    }
    const int cat = plan.pairs[*idx].object_category;
    bool any_instance = false;
    bool all_concealed = true;
    for (const auto& o : world.objects) {
      if (o.category != cat) continue;
      any_instance = true;
      if (!world.concealed(o)) all_concealed = false;
    }
    for (const auto& l : world.landmarks)
      if (l.category == cat) {
        any_instance = true;
        all_concealed = false;
      }
    if (any_instance && all_concealed)
      run.failure_mode = "closed_confinement";
    else if (!seen_category[static_cast<size_t>(cat)])
      run.failure_mode = "goal_not_found";
    else
      run.failure_mode = "other";
  }

  EpisodeRun execute() {
    sense();
    // Initial panorama: the remaining three headings.
    for (int i = 0; i < 3 && !opt.omniscient; ++i) {
      act({ActionKind::RotateRight});
      if (state.terminal != Terminal::Running) break;
    }

    while (state.terminal == Terminal::Running) {
      const auto idx = current_subtask(plan);
      if (!idx) {
        // Pairs exhausted but goals unmet; nothing left to try.
        run.failure_mode = "other";
        break;
      }
      subtask_bookkeeping(*idx);
      if (++no_action_streak > 300) {
        run.failure_mode = "other";
        break;
      }

      const SubtaskPair& pair = plan.pairs[*idx];
      const PlannerChoice choice = select(pair.object_category, pair.action);

      if (choice.kind == PlannerKind::LocalAdjustment) {
        const VisibleInstance* vi = nullptr;
        for (const auto& cand : obs.instances)
          if (cand.id == choice.target_instance) vi = &cand;
        if (!vi) continue;  // lost between frames; re-select

        if (redundant(*vi, pair.action)) {
          plan.pairs[*idx].completed = true;
          state.goal_flags = check_goal_conditions(world, plan);
          continue;
        }

        const bool corrected = !opt.ablation.uncorrected_reach;
        LocalAdjustResult adj =
            local_adjust(*vi, pose, effective, pair.action, corrected,
                         map.width, map.height);
        if (!adj.ready) {
          if (auto a = navigate_toward(adj.goal)) {
            act(*a);
          } else {
            // The lattice cannot get closer; try the interaction anyway
            // rather than stalling.
            adj.ready = true;
          }
        }
        if (adj.ready) {
          const int want = desired_pitch_deg(*vi, pose, effective,
                                             target_height(*vi), corrected);
          if (pose.pitch_deg > want) {
            act({ActionKind::LookDown});
          } else if (pose.pitch_deg < want) {
            act({ActionKind::LookUp});
          } else {
            const Outcome out = act({pair.action, vi->id});
            if (out == Outcome::Ok) {
              plan.pairs[*idx].completed = true;
            }
          }
        }
        continue;
      }

      if (choice.kind == PlannerKind::MapLookup) {
        if (auto a = navigate_toward(choice.goal)) {
          act(*a);
        } else {
          // Arrived next to stale evidence without a sighting; observation
          // repair will have cleared what it can, drop the neighborhood.
          mask_disk(choice.goal, kSearchMaskRadius);
          // Also clear the mark itself if it survived out of view.
          auto& marks = map.marks[static_cast<size_t>(pair.object_category)];
          const uint32_t mi = static_cast<uint32_t>(map.index(choice.goal));
          if (marks.count(mi)) {
            marks.erase(mi);
            map.set(pair.object_category, choice.goal, 0.0f);
          }
        }
        continue;
      }

      // Semantic search.
      Cell goal;
      if (opt.random_search || !colloc) {
        goal = random_search_goal(map, rng, &search_mask);
      } else {
        const SearchPrior prior =
            search_prior(map, *colloc, pair.object_category, reg);
        goal = next_search_goal(prior, pose, map, rng, &search_mask);
      }
      if (auto a = navigate_toward(goal)) {
        act(*a);
      } else {
        mask_disk(goal, kSearchMaskRadius);
      }
    }

    finish_failure_mode();
    run.state = state;
    run.plan = plan;
    return run;
  }
};

}  // namespace

EpisodeRun run_episode(const WorldGrid& world, const SubtaskPlan& plan,
                       const CategoryRegistry& reg, const EpisodeOptions& opt) {
  Agent agent(world, plan, reg, opt);
  return agent.execute();
}

double expert_length(const WorldGrid& world, const SubtaskPlan& plan,
                     const CategoryRegistry& reg,
                     const PhysicalConstraints& constraints) {
  EpisodeOptions opt;
  opt.constraints = constraints;
  opt.omniscient = true;
  opt.keep_trace = false;
  const EpisodeRun run = run_episode(world, plan, reg, opt);
  if (run.state.terminal != Terminal::Success)
    throw InfeasiblePlanError("expert agent could not finish the plan (" +
                              std::string(to_string(run.state.terminal)) +
                              ", " + run.failure_mode + ")");
  return run.path_length_m;
}

}  // namespace gridbench
