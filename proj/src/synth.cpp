#include "findhccs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "findhccs/csv.hpp"
#include "findhccs/ingest.hpp"
#include "findhccs/random.hpp"
#include "findhccs/validate.hpp"

namespace findhccs {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Boost: return "boost";
    case Strategy::Pollute: return "pollute";
    case Strategy::Bully: return "bully";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "boost") return Strategy::Boost;
  if (name == "pollute") return Strategy::Pollute;
  if (name == "bully") return Strategy::Bully;
  throw ContractError(fmt::format("unknown strategy '{}' (expected boost, pollute or bully)", name));
}

void SynthSpec::validate() const {
  if (duration_minutes < 1) throw ContractError("synth duration_minutes must be >= 1");
  if (gamma_minutes < 1) throw ContractError("synth gamma_minutes must be >= 1");
  if (!(background_rate > 0.0)) throw ContractError("synth background_rate must be > 0");
  if (!(repost_fraction >= 0.0 && repost_fraction <= 1.0)) throw ContractError("synth repost_fraction must lie in [0, 1]");
  if (repost_pool < 1 || hashtag_pool < 1 || url_pool < 1) throw ContractError("synth target pools must be non-empty");
  if (!(zipf_exponent > 0.0)) throw ContractError("synth zipf_exponent must be > 0");
  if (planted_organic_rate < 0.0) throw ContractError("synth planted_organic_rate must be >= 0");
  if (background_accounts < 2) throw ContractError("synth needs at least two background accounts");
  for (const auto& g : planted) {
    if (g.size < 2) throw ContractError("planted group size must be >= 2");
    if (!(g.adherence > 0.0 && g.adherence <= 1.0)) throw ContractError("planted adherence must lie in (0, 1]");
    if (g.actions_per_window < 1) throw ContractError("planted actions_per_window must be >= 1");
    if (g.active_windows < 1) throw ContractError("planted active_windows must be >= 1");
  }
}

SynthSpec synth_spec_from_json(const json& doc) {
  SynthSpec s;
  const json& d = doc.contains("synth") ? doc["synth"] : doc;
  try {
    s.seed = d.value("seed", s.seed);
    s.start_epoch = d.value("start_epoch", s.start_epoch);
    s.duration_minutes = d.value("duration_minutes", s.duration_minutes);
    s.gamma_minutes = d.value("gamma_minutes", s.gamma_minutes);
    s.background_accounts = d.value("background_accounts", s.background_accounts);
    s.background_rate = d.value("background_rate", s.background_rate);
    s.repost_fraction = d.value("repost_fraction", s.repost_fraction);
    s.repost_pool = d.value("repost_pool", s.repost_pool);
    s.hashtag_pool = d.value("hashtag_pool", s.hashtag_pool);
    s.url_pool = d.value("url_pool", s.url_pool);
    s.zipf_exponent = d.value("zipf_exponent", s.zipf_exponent);
    s.planted_organic_rate = d.value("planted_organic_rate", s.planted_organic_rate);
    if (d.contains("planted")) {
      for (const auto& g : d["planted"]) {
        PlantedGroup p;
        p.size = g.value("size", p.size);
        p.strategy = strategy_from_string(g.value("strategy", std::string("boost")));
        p.actions_per_window = g.value("actions_per_window", p.actions_per_window);
        p.adherence = g.value("adherence", p.adherence);
        p.active_windows = g.value("active_windows", p.active_windows);
        s.planted.push_back(p);
      }
    }
  } catch (const json::exception& e) {
    throw ContractError(fmt::format("invalid synth spec: {}", e.what()));
  }
  s.validate();
  return s;
}

json to_json(const SynthSpec& s) {
  json planted = json::array();
  for (const auto& g : s.planted)
    planted.push_back({{"size", g.size},
                       {"strategy", std::string(to_string(g.strategy))},
                       {"actions_per_window", g.actions_per_window},
                       {"adherence", g.adherence},
                       {"active_windows", g.active_windows}});
  return {{"seed", s.seed},
          {"start_epoch", s.start_epoch},
          {"duration_minutes", s.duration_minutes},
          {"gamma_minutes", s.gamma_minutes},
          {"background_accounts", s.background_accounts},
          {"background_rate", s.background_rate},
          {"repost_fraction", s.repost_fraction},
          {"repost_pool", s.repost_pool},
          {"hashtag_pool", s.hashtag_pool},
          {"url_pool", s.url_pool},
          {"zipf_exponent", s.zipf_exponent},
          {"planted_organic_rate", s.planted_organic_rate},
          {"planted", planted}};
}

namespace {

// Inverse-CDF sampler over ranks 0..n-1.
class Discrete {
 public:
  explicit Discrete(std::vector<double> weights) : cdf_(std::move(weights)) {
    double total = 0.0;
    for (auto& w : cdf_) {
      total += w;
      w = total;
    }
    for (auto& w : cdf_) w /= total;
  }

  static Discrete zipf(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(static_cast<double>(k + 1), exponent);
    return Discrete(std::move(w));
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

class Generator {
 public:
  explicit Generator(const SynthSpec& spec)
      : spec_(spec),
        rng_(spec.seed),
        repost_targets_(Discrete::zipf(spec.repost_pool, spec.zipf_exponent)),
        hashtags_(Discrete::zipf(spec.hashtag_pool, spec.zipf_exponent)),
        urls_(Discrete::zipf(spec.url_pool, spec.zipf_exponent)),
        activity_(pareto_weights(spec.background_accounts)) {
    for (std::size_t k = 0; k < spec.background_accounts; ++k) background_.push_back(fmt::format("bg{:05d}", k));
    for (std::size_t k = 0; k < spec.repost_pool; ++k) pool_author_.push_back(background_[activity_(rng_)]);
  }

  SynthCorpus run() {
    const double days = static_cast<double>(spec_.duration_minutes) / 1440.0;
    const auto total = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec_.background_accounts) * spec_.background_rate * days));
    std::vector<std::pair<Timestamp, AccountId>> slots;
    slots.reserve(total);
    for (std::size_t n = 0; n < total; ++n) slots.emplace_back(random_time(), background_[activity_(rng_)]);

    SynthCorpus corpus;
    for (std::size_t g = 0; g < spec_.planted.size(); ++g) {
      std::vector<AccountId> members;
      for (std::size_t i = 0; i < spec_.planted[g].size; ++i) members.push_back(fmt::format("g{}m{}", g, i));
      const auto organic = static_cast<std::size_t>(std::floor(spec_.planted_organic_rate * days));
      for (const auto& m : members)
        for (std::size_t n = 0; n < organic; ++n) slots.emplace_back(random_time(), m);
      std::sort(members.begin(), members.end());
      corpus.truth.push_back(members);
    }

    std::stable_sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, author] : slots) organic_post(t, author);
    for (std::size_t g = 0; g < spec_.planted.size(); ++g) planted_activity(g, corpus.truth[g]);

    std::stable_sort(posts_.begin(), posts_.end(), [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
    corpus.posts = std::move(posts_);
    return corpus;
  }

 private:
  static std::vector<double> pareto_weights(std::size_t n) {
    // Heavy-tailed per-account activity (Pareto, shape 2). Seeded separately
    // so the account mix is stable when other knobs change.
    Rng r(0x5eed);
    std::vector<double> w(n);
    for (auto& x : w) x = std::pow(1.0 - r.uniform(), -0.5);
    return w;
  }

  Timestamp random_time() {
    return spec_.start_epoch + static_cast<Timestamp>(rng_.below(static_cast<std::uint64_t>(spec_.duration_minutes * 60)));
  }

  Post& new_post(const std::string& prefix, Timestamp t, const AccountId& author) {
    Post p;
    p.post_id = fmt::format("{}{:07d}", prefix, posts_.size());
    p.author_id = author;
    p.timestamp = t;
    posts_.push_back(std::move(p));
    return posts_.back();
  }

  static std::string url_for(std::size_t k) { return fmt::format("https://site{:02d}.example/item/{}", k % 50, k); }

  void finish(Post& p) {
    p.domains.clear();
    for (const auto& u : p.urls) p.domains.push_back(url_hostname(u));
  }

  void organic_post(Timestamp t, const AccountId& author) {
    if (rng_.bernoulli(spec_.repost_fraction)) {
      // An account can repost a given post only once.
      auto& seen = reposted_[author];
      std::size_t k = repost_targets_(rng_);
      for (int tries = 0; seen.count(k) && tries < 32; ++tries) k = repost_targets_(rng_);
      if (!seen.insert(k).second) return original_post(t, author);
      Post& p = new_post("b", t, author);
      p.reposted_post_id = fmt::format("pool{:05d}", k);
      p.reposted_author_id = pool_author_[k];
      p.text = fmt::format("RT @{}: shared story number {} from the pool", pool_author_[k], k);
      finish(p);
      return;
    }
    original_post(t, author);
  }

  void original_post(Timestamp t, const AccountId& author) {
    Post& p = new_post("b", t, author);
    const auto tags = rng_.below(3);
    std::set<std::string> chosen;
    for (std::uint64_t i = 0; i < tags; ++i) chosen.insert(fmt::format("tag{:04d}", hashtags_(rng_)));
    p.hashtags.assign(chosen.begin(), chosen.end());
    if (rng_.bernoulli(0.3)) p.mentioned_ids.push_back(background_[rng_.below(background_.size())]);
    if (rng_.bernoulli(0.2)) p.urls.push_back(url_for(urls_(rng_)));
    if (rng_.bernoulli(0.1) && !originals_.empty()) {
      const std::size_t parent = originals_[rng_.below(originals_.size())];
      p.replied_post_id = posts_[parent].post_id;
      p.replied_author_id = posts_[parent].author_id;
    }
    p.text = fmt::format("{} thoughts on topic {} at {}", author, rng_.below(1000), t % 86400);
    for (const auto& h : p.hashtags) p.text += " #" + h;
    finish(p);
    originals_.push_back(posts_.size() - 1);
  }

  void planted_activity(std::size_t g, const std::vector<AccountId>& members) {
    const PlantedGroup& spec = spec_.planted[g];
    const std::int64_t gamma = spec_.gamma_minutes * 60;
    const Timestamp end = spec_.start_epoch + spec_.duration_minutes * 60;
    const std::int64_t first = (spec_.start_epoch + gamma - 1) / gamma;
    const std::int64_t count = std::max<std::int64_t>(1, end / gamma - first);
    std::vector<std::int64_t> windows(static_cast<std::size_t>(count));
    for (std::int64_t w = 0; w < count; ++w) windows[static_cast<std::size_t>(w)] = first + w;
    rng_.shuffle(windows);
    windows.resize(std::min<std::size_t>(windows.size(), static_cast<std::size_t>(spec.active_windows)));
    std::sort(windows.begin(), windows.end());

    const AccountId lead = fmt::format("{}{}", spec.strategy == Strategy::Bully ? "victim" : "amp", g);
    for (std::int64_t w : windows) {
      const Timestamp ws = w * gamma;
      for (int a = 0; a < spec.actions_per_window; ++a) {
        const std::string target = fmt::format("{}w{}a{}", lead, w, a);
        if (spec.strategy == Strategy::Bully) {
          Post& root = new_post("v", ws, lead);
          root.post_id = target;
          root.text = fmt::format("{} posts an update {}", lead, target);
        }
        for (const auto& m : members) {
          // Non-adherent members act one to two windows late.
          const bool adherent = rng_.bernoulli(spec.adherence);
          Timestamp t = adherent ? ws + 1 + static_cast<Timestamp>(rng_.below(static_cast<std::uint64_t>(gamma - 1)))
                                 : ws + gamma + static_cast<Timestamp>(rng_.below(static_cast<std::uint64_t>(2 * gamma)));
          Post& p = new_post("p", t, m);
          switch (spec.strategy) {
            case Strategy::Boost:
              p.reposted_post_id = target;
              p.reposted_author_id = lead;
              p.text = fmt::format("RT @{}: campaign message {}", lead, target);
              break;
            case Strategy::Pollute: {
              const auto tag = fmt::format("campaign{}x{}", g, a % 3);
              p.hashtags = {tag};
              p.text = fmt::format("everyone should know about this #{}", tag);
              break;
            }
            case Strategy::Bully:
              p.replied_post_id = target;
              p.replied_author_id = lead;
              p.mentioned_ids = {lead};
              p.text = fmt::format("@{} you should be ashamed", lead);
              break;
          }
          finish(p);
        }
      }
    }
  }

  const SynthSpec& spec_;
  Rng rng_;
  Discrete repost_targets_;
  Discrete hashtags_;
  Discrete urls_;
  Discrete activity_;
  std::vector<AccountId> background_;
  std::vector<AccountId> pool_author_;
  std::vector<Post> posts_;
  std::vector<std::size_t> originals_;
  std::map<AccountId, std::set<std::size_t>> reposted_;
};

}  // namespace

SynthCorpus generate_corpus(const SynthSpec& spec) {
  spec.validate();
  return Generator(spec).run();
}

void write_truth_csv(std::ostream& out, const std::vector<std::vector<AccountId>>& groups) {
  csv::write_row(out, {"group_id", "account_id"});
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& m : groups[g]) csv::write_row(out, {std::to_string(g), m});
}

std::vector<std::vector<AccountId>> read_truth_csv(std::istream& in) {
  csv::Table table(in);
  auto c_g = table.column("group_id"), c_a = table.column("account_id");
  std::map<int, std::vector<AccountId>> groups;
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("truth CSV row has wrong column count");
    groups[std::stoi(row[c_g])].push_back(row[c_a]);
  }
  std::vector<std::vector<AccountId>> out;
  for (auto& [id, members] : groups) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

RecoveryReport score_recovery(const std::vector<Hcc>& detected, const std::vector<std::vector<AccountId>>& truth) {
  RecoveryReport report;
  AccountSet detected_all, planted_all;
  std::vector<AccountSet> detected_sets;
  for (const auto& h : detected) {
    detected_sets.emplace_back(h.members.begin(), h.members.end());
    detected_all.insert(h.members.begin(), h.members.end());
  }
  for (std::size_t g = 0; g < truth.size(); ++g) {
    AccountSet planted(truth[g].begin(), truth[g].end());
    planted_all.insert(planted.begin(), planted.end());
    GroupMatch match;
    match.group_id = static_cast<int>(g);
    for (std::size_t h = 0; h < detected_sets.size(); ++h) {
      const double j = set_similarity(planted, detected_sets[h], SetMeasure::Jaccard);
      if (j > match.jaccard) {
        match.jaccard = j;
        match.best_hcc = detected[h].id;
      }
    }
    report.groups.push_back(match);
  }
  std::size_t hit = 0;
  for (const auto& a : detected_all) hit += planted_all.count(a);
  report.precision_defined = !detected_all.empty();
  report.precision = detected_all.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(detected_all.size());
  report.recall = planted_all.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(planted_all.size());
  return report;
}

json to_json(const RecoveryReport& r) {
  json groups = json::array();
  for (const auto& g : r.groups) groups.push_back({{"group_id", g.group_id}, {"best_hcc", g.best_hcc}, {"jaccard", g.jaccard}});
  return {{"groups", groups},
          {"precision", r.precision},
          {"recall", r.recall},
          {"precision_defined", r.precision_defined}};
}

}  // namespace findhccs
