#include "findhccs/evidence.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "findhccs/csv.hpp"

namespace findhccs {

WindowConfig WindowConfig::minutes(std::int64_t gamma_minutes, Timestamp origin) {
  if (gamma_minutes < 1) throw ContractError(fmt::format("gamma_minutes must be >= 1 (got {})", gamma_minutes));
  return {gamma_minutes * 60, origin};
}

WindowConfig WindowConfig::seconds(std::int64_t gamma_seconds, Timestamp origin) {
  if (gamma_seconds < 1) throw ContractError(fmt::format("gamma_seconds must be >= 1 (got {})", gamma_seconds));
  return {gamma_seconds, origin};
}

WindowIndex assign_window(Timestamp timestamp, const WindowConfig& cfg) {
  if (cfg.length_seconds < 1) throw ContractError("window length must be at least one second");
  if (timestamp < cfg.origin)
    throw DomainError(fmt::format("timestamp {} precedes window origin {}", timestamp, cfg.origin));
  return (timestamp - cfg.origin) / cfg.length_seconds;
}

Timestamp window_start(WindowIndex index, const WindowConfig& cfg) { return cfg.origin + index * cfg.length_seconds; }

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::CoRetweet: return "co-retweet";
    case Criterion::CoHashtag: return "co-hashtag";
    case Criterion::CoUrl: return "co-url";
    case Criterion::CoDomain: return "co-domain";
    case Criterion::CoMention: return "co-mention";
    case Criterion::CoConv: return "co-conv";
  }
  return "?";
}

Criterion criterion_from_string(std::string_view name) {
  for (auto c : {Criterion::CoRetweet, Criterion::CoHashtag, Criterion::CoUrl, Criterion::CoDomain,
                 Criterion::CoMention, Criterion::CoConv})
    if (to_string(c) == name) return c;
  throw ContractError(fmt::format(
      "unknown criterion '{}' (expected co-retweet, co-hashtag, co-url, co-domain, co-mention or co-conv)", name));
}

InteractionKind consumed_kind(Criterion c) {
  switch (c) {
    case Criterion::CoRetweet: return InteractionKind::Repost;
    case Criterion::CoHashtag: return InteractionKind::Hashtag;
    case Criterion::CoUrl: return InteractionKind::Url;
    case Criterion::CoDomain: return InteractionKind::Domain;
    case Criterion::CoMention: return InteractionKind::Mention;
    case Criterion::CoConv: return InteractionKind::Conv;
  }
  return InteractionKind::Repost;
}

Multiplicity multiplicity_from_string(std::string_view name) {
  if (name == "min-count") return Multiplicity::MinCount;
  if (name == "binary") return Multiplicity::Binary;
  throw ContractError(fmt::format("unknown multiplicity '{}' (expected min-count or binary)", name));
}

std::string_view to_string(Multiplicity m) { return m == Multiplicity::Binary ? "binary" : "min-count"; }

std::vector<Interaction> filter_interactions(const std::vector<Interaction>& interactions, const CriterionSpec& spec) {
  const auto kind = consumed_kind(spec.criterion);
  const bool quotes = spec.criterion == Criterion::CoRetweet && spec.include_quotes_as_reposts;
  std::vector<Interaction> out;
  for (const auto& i : interactions)
    if (i.kind == kind || (quotes && i.kind == InteractionKind::Quote)) out.push_back(i);
  return out;
}

namespace {

// Interned (window, target, account) records, grouped for pair emission.
struct Occurrence {
  WindowIndex window;
  std::uint32_t target;
  std::uint32_t account;
};

struct TargetGroup {
  std::uint32_t target;
  std::vector<std::pair<std::uint32_t, std::int64_t>> accounts;  // (account, count), ascending account
};

struct WindowGroup {
  WindowIndex window;
  std::vector<TargetGroup> targets;
};

struct Interned {
  std::vector<std::string> accounts;  // sorted, so id order == lexicographic order
  std::vector<std::string> targets;
  std::vector<WindowGroup> windows;   // ascending window
};

Interned intern(const std::vector<Interaction>& filtered, const WindowConfig& cfg) {
  Interned in;
  in.accounts.reserve(filtered.size());
  for (const auto& i : filtered) in.accounts.push_back(i.actor);
  std::sort(in.accounts.begin(), in.accounts.end());
  in.accounts.erase(std::unique(in.accounts.begin(), in.accounts.end()), in.accounts.end());
  std::unordered_map<std::string_view, std::uint32_t> account_ids;
  account_ids.reserve(in.accounts.size());
  for (std::uint32_t k = 0; k < in.accounts.size(); ++k) account_ids.emplace(in.accounts[k], k);

  std::unordered_map<std::string_view, std::uint32_t> target_ids;
  std::vector<Occurrence> occ;
  occ.reserve(filtered.size());
  for (const auto& i : filtered) {
    auto [it, inserted] = target_ids.emplace(i.target, static_cast<std::uint32_t>(in.targets.size()));
    if (inserted) in.targets.push_back(i.target);
    occ.push_back({assign_window(i.timestamp, cfg), it->second, account_ids.at(i.actor)});
  }
  std::sort(occ.begin(), occ.end(), [](const Occurrence& a, const Occurrence& b) {
    if (a.window != b.window) return a.window < b.window;
    if (a.target != b.target) return a.target < b.target;
    return a.account < b.account;
  });

  for (std::size_t k = 0; k < occ.size();) {
    if (in.windows.empty() || in.windows.back().window != occ[k].window) in.windows.push_back({occ[k].window, {}});
    auto& targets = in.windows.back().targets;
    if (targets.empty() || targets.back().target != occ[k].target) targets.push_back({occ[k].target, {}});
    auto& accounts = targets.back().accounts;
    std::size_t j = k;
    while (j < occ.size() && occ[j].window == occ[k].window && occ[j].target == occ[k].target &&
           occ[j].account == occ[k].account)
      ++j;
    accounts.emplace_back(occ[k].account, static_cast<std::int64_t>(j - k));
    k = j;
  }
  return in;
}

std::int64_t contribution(std::int64_t a, std::int64_t b, Multiplicity m) {
  return m == Multiplicity::Binary ? 1 : std::min(a, b);
}

template <typename Fn>
void for_each_window_parallel(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t w = 0; w < count; ++w) fn(w);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t w; (w = next.fetch_add(1)) < count;) fn(w);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<EvidencePair> find_coordination(const std::vector<Interaction>& filtered, const CriterionSpec& spec,
                                            const WindowConfig& cfg, const EvidenceOptions& opts) {
  const Interned in = intern(filtered, cfg);
  const std::string criterion(to_string(spec.criterion));
  std::vector<std::vector<EvidencePair>> per_window(in.windows.size());

  for_each_window_parallel(in.windows.size(), opts.workers, [&](std::size_t w) {
    std::unordered_map<std::uint64_t, std::int64_t> weights;
    for (const auto& tg : in.windows[w].targets) {
      const auto& acc = tg.accounts;
      for (std::size_t i = 0; i < acc.size(); ++i)
        for (std::size_t j = i + 1; j < acc.size(); ++j) {
          std::uint64_t key = (std::uint64_t{acc[i].first} << 32) | acc[j].first;
          weights[key] += contribution(acc[i].second, acc[j].second, opts.multiplicity);
        }
    }
    std::vector<std::pair<std::uint64_t, std::int64_t>> sorted(weights.begin(), weights.end());
    std::sort(sorted.begin(), sorted.end());
    auto& out = per_window[w];
    out.reserve(sorted.size());
    for (const auto& [key, weight] : sorted)
      out.push_back({in.accounts[key >> 32], in.accounts[key & 0xffffffffu], criterion, in.windows[w].window, weight});
  });

  std::vector<EvidencePair> result;
  for (auto& v : per_window) result.insert(result.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return result;
}

std::vector<EvidenceDetail> find_coordination_detailed(const std::vector<Interaction>& filtered,
                                                       const CriterionSpec& spec, const WindowConfig& cfg,
                                                       const EvidenceOptions& opts) {
  const Interned in = intern(filtered, cfg);
  const std::string criterion(to_string(spec.criterion));
  std::vector<std::vector<EvidenceDetail>> per_window(in.windows.size());

  for_each_window_parallel(in.windows.size(), opts.workers, [&](std::size_t w) {
    auto& out = per_window[w];
    for (const auto& tg : in.windows[w].targets) {
      const auto& acc = tg.accounts;
      for (std::size_t i = 0; i < acc.size(); ++i)
        for (std::size_t j = i + 1; j < acc.size(); ++j)
          out.push_back({in.accounts[acc[i].first], in.accounts[acc[j].first], criterion, in.windows[w].window,
                         in.targets[tg.target], contribution(acc[i].second, acc[j].second, opts.multiplicity)});
    }
    std::sort(out.begin(), out.end(), [](const EvidenceDetail& a, const EvidenceDetail& b) {
      return std::tie(a.account_a, a.account_b, a.target) < std::tie(b.account_a, b.account_b, b.target);
    });
  });

  std::vector<EvidenceDetail> result;
  for (auto& v : per_window) result.insert(result.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return result;
}

void write_evidence_csv(std::ostream& out, const std::vector<EvidencePair>& pairs) {
  csv::write_row(out, {"window_index", "criterion", "account_a", "account_b", "weight"});
  for (const auto& p : pairs)
    csv::write_row(out, {std::to_string(p.window_index), p.criterion, p.account_a, p.account_b, std::to_string(p.weight)});
}

std::vector<EvidencePair> read_evidence_csv(std::istream& in) {
  csv::Table table(in);
  auto c_w = table.column("window_index"), c_c = table.column("criterion"), c_a = table.column("account_a"),
       c_b = table.column("account_b"), c_weight = table.column("weight");
  std::vector<EvidencePair> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("evidence CSV row has wrong column count");
    out.push_back({row[c_a], row[c_b], row[c_c], std::stoll(row[c_w]), std::stoll(row[c_weight])});
  }
  return out;
}

void write_evidence_detail_csv(std::ostream& out, const std::vector<EvidenceDetail>& details) {
  csv::write_row(out, {"window_index", "criterion", "account_a", "account_b", "target", "weight"});
  for (const auto& d : details)
    csv::write_row(out, {std::to_string(d.window_index), d.criterion, d.account_a, d.account_b, d.target,
                         std::to_string(d.weight)});
}

std::vector<EvidenceDetail> read_evidence_detail_csv(std::istream& in) {
  csv::Table table(in);
  auto c_w = table.column("window_index"), c_c = table.column("criterion"), c_a = table.column("account_a"),
       c_b = table.column("account_b"), c_t = table.column("target"), c_weight = table.column("weight");
  std::vector<EvidenceDetail> out;
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("evidence detail CSV row has wrong column count");
    out.push_back({row[c_a], row[c_b], row[c_c], std::stoll(row[c_w]), row[c_t], std::stoll(row[c_weight])});
  }
  return out;
}

}  // namespace findhccs
