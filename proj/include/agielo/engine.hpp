#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agielo/rating.hpp"
#include "agielo/scoring.hpp"

namespace agielo {

enum class Category { kAgent, kTestCase };

const char* category_name(Category c);

struct Player {
  std::string id;
  Category category = Category::kAgent;
  Rating rating;
  std::size_t matches_played = 0;
};

/// One agent-vs-test-case encounter.
struct MatchRecord {
  std::string agent_id;
  std::string case_id;
  double raw_metric = 0.0;
  double score = 0.0;
};

/// Agents x test cases grid of raw metric values. Absent cells are allowed
/// and are never scheduled.
class ScoreMatrix {
 public:
  struct Cell {
    std::size_t agent;
    std::size_t test_case;
    double value;
  };

  ScoreMatrix(std::vector<std::string> agent_ids,
              std::vector<std::string> case_ids,
              std::string scoring_fn_id = "identity");

  const std::vector<std::string>& agent_ids() const { return agent_ids_; }
  const std::vector<std::string>& case_ids() const { return case_ids_; }
  const std::string& scoring_fn_id() const { return scoring_fn_id_; }
  void set_scoring_fn_id(std::string id) { scoring_fn_id_ = std::move(id); }

  std::size_t n_agents() const { return agent_ids_.size(); }
  std::size_t n_cases() const { return case_ids_.size(); }
  std::size_t n_matches() const { return n_present_; }

  /// Throws FormatError on a non-finite value or an already populated cell.
  void set(std::size_t agent, std::size_t test_case, double value);
  std::optional<double> at(std::size_t agent, std::size_t test_case) const;

  /// Present cells, test-case major, in input order.
  std::vector<Cell> cells() const;

 private:
  std::vector<std::string> agent_ids_;
  std::vector<std::string> case_ids_;
  std::string scoring_fn_id_;
  std::vector<double> values_;  // NaN marks an absent cell
  std::size_t n_present_ = 0;
};

/// Reads the `case_id,<agent_1>,...,<agent_k>` CSV layout; one row per test
/// case, empty cell = absent match. Throws FormatError naming the offending
/// row/column.
ScoreMatrix load_score_matrix(std::istream& in,
                              const std::string& scoring_fn_id = "identity");
ScoreMatrix load_score_matrix_file(const std::string& path,
                                   const std::string& scoring_fn_id = "identity");
void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix);

/// Scores every present cell. Throws FormatError naming the cell whose metric
/// the scoring function rejects.
std::vector<MatchRecord> make_records(const ScoreMatrix& matrix,
                                      const ScoringFunction& fn);

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t passes = 1;
  std::vector<double> checkpoints{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  RatingConstants constants;

  /// Throws ConfigError unless passes >= 1 and checkpoints are strictly
  /// increasing within (0, 100].
  void validate() const;
};

/// Sidecar key-value settings: `key = value` lines, `#` comments.
/// Keys: seed, passes, variant, scoring, checkpoints, k_factor.
struct RunSettings {
  RunConfig config;
  std::string scoring = "identity";
};

RunSettings parse_run_settings(std::istream& in);
std::vector<double> parse_checkpoint_list(const std::string& text);

struct ScheduledMatch {
  std::size_t agent;
  std::size_t test_case;

  bool operator==(const ScheduledMatch&) const = default;
};

/// Every present cell once per pass, each pass independently shuffled.
std::vector<ScheduledMatch> build_schedule(const ScoreMatrix& matrix,
                                           const RunConfig& config);

struct RatingSnapshot {
  double match_percentage = 0.0;
  std::size_t matches_completed = 0;
  std::vector<Rating> ratings;  // aligned with RunResult::players
};

/// Players are ordered agents first (matrix order), then test cases.
struct RunResult {
  std::vector<Player> players;
  std::vector<RatingSnapshot> snapshots;
  std::size_t n_agents = 0;
  std::size_t matches_played = 0;
};

/// Every agent and test case at the configured initial rating.
std::vector<Player> initial_players(const ScoreMatrix& matrix,
                                    const RatingConstants& constants);

RunResult run_ratings(const ScoreMatrix& matrix, const RunConfig& config);

/// Metadata carried alongside a serialized run.
struct RunMetadata {
  std::uint64_t seed = 0;
  std::string variant = "standard";
  std::string generator;
  std::string scoring = "identity";
  std::size_t passes = 1;
  std::size_t n_agents = 0;
  std::size_t n_cases = 0;
  std::size_t n_matches = 0;
  std::string input;  // source CSV path as given, may be empty
};

struct RunDocument {
  RunMetadata metadata;
  std::vector<Player> players;
  std::vector<RatingSnapshot> snapshots;
};

/// Run JSON with ratings rounded to one decimal. Same inputs give the same
/// bytes.
std::string run_to_json(const ScoreMatrix& matrix, const RunConfig& config,
                        const RunResult& result, const std::string& input = "");

/// Throws FormatError on malformed documents.
RunDocument run_from_json(const std::string& text);

}  // namespace agielo
