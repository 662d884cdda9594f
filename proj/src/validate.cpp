#include "findhccs/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "findhccs/csv.hpp"
#include "findhccs/random.hpp"

namespace findhccs {

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m) {
  csv::Row header{"label"};
  header.insert(header.end(), m.labels.begin(), m.labels.end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    csv::Row row{m.labels[i]};
    for (double v : m.values[i]) row.push_back(csv::format_number(v));
    csv::write_row(out, row);
  }
}

namespace {

std::size_t intersection_size(const AccountSet& x, const AccountSet& y) {
  std::size_t n = 0;
  auto a = x.begin(), b = y.begin();
  while (a != x.end() && b != y.end()) {
    if (*a < *b) ++a;
    else if (*b < *a) ++b;
    else { ++n; ++a; ++b; }
  }
  return n;
}

double entropy_bits(const std::map<std::string, std::int64_t>& freq) {
  std::int64_t total = 0;
  for (const auto& [v, c] : freq) total += c;
  double h = 0.0;
  for (const auto& [v, c] : freq) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // no negative zero
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) { ok = false; break; }
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (!ok) {
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

constexpr std::size_t kNgram = 5;

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

class NgramVectorizer {
 public:
  SparseVector vectorize(std::string_view text) {
    const auto cps = decode_utf8(text);
    std::map<std::uint32_t, double> counts;
    for (std::size_t i = 0; i + kNgram <= cps.size(); ++i) {
      auto [it, inserted] = ids_.emplace(cps.substr(i, kNgram), static_cast<std::uint32_t>(ids_.size()));
      counts[it->second] += 1.0;
    }
    return {counts.begin(), counts.end()};
  }

 private:
  std::unordered_map<std::u32string, std::uint32_t> ids_;
};

double norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [k, c] : v) s += c * c;
  return std::sqrt(s);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) ++i;
    else if (j->first < i->first) ++j;
    else { dot += i->second * j->second; ++i; ++j; }
  }
  return std::min(1.0, dot / (norm(a) * norm(b)));
}

}  // namespace

double set_similarity(const AccountSet& x, const AccountSet& y, SetMeasure measure) {
  const double common = static_cast<double>(intersection_size(x, y));
  if (measure == SetMeasure::Jaccard) {
    const double uni = static_cast<double>(x.size() + y.size()) - common;
    return uni == 0.0 ? 1.0 : common / uni;
  }
  const auto smaller = std::min(x.size(), y.size());
  if (smaller == 0) throw DomainError("overlap coefficient is undefined when a set is empty");
  return common / static_cast<double>(smaller);
}

MembershipComparison membership_similarity_matrix(const std::vector<std::pair<std::string, AccountSet>>& runs,
                                                  SetMeasure measure) {
  if (runs.size() < 2) throw ContractError("membership comparison needs at least two runs");
  MembershipComparison out;
  const auto n = runs.size();
  out.similarity.values.assign(n, std::vector<double>(n, 0.0));
  out.common.assign(n, std::vector<std::size_t>(n, 0));
  for (const auto& [label, set] : runs) out.similarity.labels.push_back(label);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double s = set_similarity(runs[i].second, runs[j].second, measure);
      out.similarity.values[i][j] = out.similarity.values[j][i] = s;
      out.common[i][j] = out.common[j][i] = intersection_size(runs[i].second, runs[j].second);
    }
  return out;
}

double internal_ratio(const AccountSet& members, const std::vector<Post>& posts, RatioKind kind) {
  std::int64_t internal = 0, external = 0;
  for (const auto& p : posts) {
    if (!members.count(p.author_id)) continue;
    if (kind == RatioKind::RepostAuthor) {
      if (!p.reposted_post_id || !p.reposted_author_id) continue;
      (members.count(*p.reposted_author_id) ? internal : external) += 1;
    } else {
      for (const auto& m : p.mentioned_ids) (members.count(m) ? internal : external) += 1;
    }
  }
  if (internal + external == 0) return 0.0;
  return static_cast<double>(internal) / static_cast<double>(internal + external);
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Hashtag: return "hashtag";
    case FeatureKind::UrlDomain: return "url-domain";
    case FeatureKind::MentionedAccount: return "mentioned-account";
    case FeatureKind::RetweetedAccount: return "retweeted-account";
    case FeatureKind::RetweetedTweet: return "retweeted-tweet";
  }
  return "?";
}

const std::vector<FeatureKind>& all_feature_kinds() {
  static const std::vector<FeatureKind> kinds = {FeatureKind::Hashtag, FeatureKind::UrlDomain,
                                                 FeatureKind::MentionedAccount, FeatureKind::RetweetedAccount,
                                                 FeatureKind::RetweetedTweet};
  return kinds;
}

std::optional<double> feature_entropy(const AccountSet& members, const std::vector<Post>& posts, FeatureKind kind) {
  std::map<std::string, std::int64_t> freq;
  for (const auto& p : posts) {
    if (!members.count(p.author_id)) continue;
    switch (kind) {
      case FeatureKind::Hashtag:
        for (const auto& h : p.hashtags) ++freq[h];
        break;
      case FeatureKind::UrlDomain:
        for (const auto& d : p.domains)
          if (!d.empty()) ++freq[d];
        break;
      case FeatureKind::MentionedAccount:
        for (const auto& m : p.mentioned_ids) ++freq[m];
        break;
      case FeatureKind::RetweetedAccount:
        if (p.reposted_post_id && p.reposted_author_id) ++freq[*p.reposted_author_id];
        break;
      case FeatureKind::RetweetedTweet:
        if (p.reposted_post_id) ++freq[*p.reposted_post_id];
        break;
    }
  }
  if (freq.empty()) return std::nullopt;
  return entropy_bits(freq);
}

std::vector<EntropyRow> entropy_report(const std::vector<std::pair<std::string, AccountSet>>& groups,
                                       const std::vector<Post>& posts) {
  std::vector<EntropyRow> rows;
  for (const auto& [id, members] : groups)
    for (auto kind : all_feature_kinds())
      if (auto h = feature_entropy(members, posts, kind)) rows.push_back({id, kind, *h});
  return rows;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyRow>& rows) {
  csv::write_row(out, {"hcc_id", "feature_kind", "entropy_bits"});
  for (const auto& r : rows) csv::write_row(out, {r.group_id, std::string(to_string(r.kind)), csv::format_number(r.bits)});
}

double ngram_cosine(std::string_view a, std::string_view b) {
  NgramVectorizer vec;
  return cosine(vec.vectorize(a), vec.vectorize(b));
}

SimilarityMatrix content_similarity_matrix(const std::vector<Hcc>& hccs, const std::vector<Post>& posts) {
  std::vector<const Hcc*> ordered;
  for (const auto& h : hccs) ordered.push_back(&h);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Hcc* a, const Hcc* b) {
    if (a->members.size() != b->members.size()) return a->members.size() > b->members.size();
    return a->id < b->id;
  });

  SimilarityMatrix m;
  for (const Hcc* h : ordered) {
    std::vector<AccountId> members = h->members;
    std::sort(members.begin(), members.end());
    m.labels.insert(m.labels.end(), members.begin(), members.end());
  }

  std::unordered_map<std::string_view, std::vector<const Post*>> by_author;
  for (const auto& p : posts) by_author[p.author_id].push_back(&p);
  NgramVectorizer vec;
  std::vector<SparseVector> vectors;
  for (const auto& account : m.labels) {
    std::string doc;
    auto it = by_author.find(account);
    if (it != by_author.end()) {
      auto list = it->second;
      std::stable_sort(list.begin(), list.end(), [](const Post* a, const Post* b) { return a->timestamp < b->timestamp; });
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (k) doc.push_back('\n');
        doc += list[k]->text;
      }
    }
    vectors.push_back(vec.vectorize(doc));
  }

  const auto n = m.labels.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) m.values[i][j] = m.values[j][i] = cosine(vectors[i], vectors[j]);
  }
  return m;
}

std::vector<std::vector<AccountId>> random_baseline(const std::vector<Hcc>& hccs, const AccountSet& all_accounts,
                                                    std::uint64_t seed) {
  AccountSet members;
  std::size_t needed = 0;
  for (const auto& h : hccs) {
    members.insert(h.members.begin(), h.members.end());
    needed += h.members.size();
  }
  std::vector<AccountId> pool;
  for (const auto& a : all_accounts)
    if (!members.count(a)) pool.push_back(a);
  if (pool.size() < needed)
    throw ContractError(fmt::format("random baseline needs {} non-HCC accounts but only {} are available", needed,
                                    pool.size()));
  Rng rng(seed);
  rng.shuffle(pool);
  std::vector<std::vector<AccountId>> groups;
  std::size_t next = 0;
  for (const auto& h : hccs) {
    std::vector<AccountId> g(pool.begin() + static_cast<long>(next),
                             pool.begin() + static_cast<long>(next + h.members.size()));
    next += h.members.size();
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  return groups;
}

CollapsedGraph hashtag_cooccurrence(const std::vector<Post>& posts, std::int64_t min_edge_weight,
                                    const std::set<std::string>& excluded) {
  CollapsedGraph g;
  std::map<AccountPair, double> counts;
  for (const auto& p : posts) {
    std::set<std::string> tags;
    for (const auto& h : p.hashtags)
      if (!excluded.count(h)) tags.insert(h);
    g.nodes.insert(tags.begin(), tags.end());
    for (auto a = tags.begin(); a != tags.end(); ++a)
      for (auto b = std::next(a); b != tags.end(); ++b) counts[{*a, *b}] += 1.0;
  }
  for (const auto& [pair, w] : counts)
    if (w >= static_cast<double>(min_edge_weight)) g.edges.emplace(pair, w);
  return g;
}

std::vector<TimelineBin> activity_timeline(const AccountSet& group, const std::vector<Post>& posts,
                                           std::int64_t bin_seconds) {
  if (bin_seconds < 1) throw ContractError("timeline bin must be at least one second");
  if (posts.empty()) return {};
  Timestamp lo = posts.front().timestamp, hi = lo;
  for (const auto& p : posts) {
    lo = std::min(lo, p.timestamp);
    hi = std::max(hi, p.timestamp);
  }
  auto floor_div = [](Timestamp t, std::int64_t d) { return t >= 0 ? t / d : -((-t + d - 1) / d); };
  const Timestamp first = floor_div(lo, bin_seconds), last = floor_div(hi, bin_seconds);
  std::vector<TimelineBin> bins;
  for (Timestamp b = first; b <= last; ++b) bins.push_back({b * bin_seconds, 0});
  for (const auto& p : posts)
    if (group.count(p.author_id)) ++bins[static_cast<std::size_t>(floor_div(p.timestamp, bin_seconds) - first)].count;
  return bins;
}

ReasonNetwork account_reason_network(const std::vector<Hcc>& hccs,
                                     const std::optional<std::vector<EvidenceDetail>>& details) {
  if (!details)
    throw ContractError(
        "account-reason network needs per-target evidence; re-run the pipeline with evidence_detail = true");
  std::unordered_map<std::string, int> hcc_of;
  for (const auto& h : hccs)
    for (const auto& m : h.members) hcc_of[m] = h.id;

  ReasonNetwork net;
  for (const auto& h : hccs)
    for (const auto& m : h.members) net.nodes.push_back({"account:" + m, "account", m, h.id, ""});
  for (const auto& h : hccs)
    for (const auto& [pair, w] : h.edges)
      net.edges.push_back({"account:" + pair.first, "account:" + pair.second, "coordinates-with", w});

  // (reason id) -> (criterion, target); (account, reason) -> count
  std::map<std::string, std::pair<std::string, std::string>> reasons;
  std::map<std::pair<std::string, std::string>, double> caused_by;
  for (const auto& d : *details) {
    auto a = hcc_of.find(d.account_a), b = hcc_of.find(d.account_b);
    if (a == hcc_of.end() || b == hcc_of.end() || a->second != b->second) continue;
    std::string reason = "reason:" + d.criterion + ":" + d.target;
    reasons.emplace(reason, std::make_pair(d.criterion, d.target));
    caused_by[{"account:" + d.account_a, reason}] += 1.0;
    caused_by[{"account:" + d.account_b, reason}] += 1.0;
  }
  for (const auto& [id, ct] : reasons) net.nodes.push_back({id, "reason", ct.second, -1, ct.first});
  for (const auto& [key, count] : caused_by) net.edges.push_back({key.first, key.second, "caused-by", count});
  return net;
}

}  // namespace findhccs
