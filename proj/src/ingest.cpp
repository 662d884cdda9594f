#include "findhccs/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "findhccs/csv.hpp"

namespace findhccs {

using nlohmann::json;

namespace {

// Thrown internally for a record that cannot become a Post.
struct Malformed {};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_hashtag(std::string_view tag) {
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return ascii_lower(tag);
}

std::string key_from_json(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw Malformed{};
}

Timestamp timestamp_from_json(const json& v) {
  if (v.is_number_integer()) return v.get<Timestamp>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw Malformed{};
    return std::stoll(s);
  }
  throw Malformed{};
}

std::optional<std::string> optional_key(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  std::string value = key_from_json(*it);
  if (value.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> string_list(const json& obj, const char* name) {
  std::vector<std::string> out;
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw Malformed{};
  for (const auto& item : *it) out.push_back(key_from_json(item));
  return out;
}

// Derived fields and invariants shared by every input mode.
void finish_post(Post& post) {
  if (post.post_id.empty() || post.author_id.empty() || post.timestamp <= 0) throw Malformed{};
  std::vector<std::string> tags;
  for (const auto& t : post.hashtags) {
    auto norm = normalize_hashtag(t);
    if (!norm.empty()) tags.push_back(std::move(norm));
  }
  post.hashtags = std::move(tags);
  std::erase_if(post.mentioned_ids, [](const std::string& s) { return s.empty(); });
  std::erase_if(post.urls, [](const std::string& s) { return s.empty(); });
  post.domains.clear();
  for (const auto& u : post.urls) post.domains.push_back(url_hostname(u));
}

Post post_from_canonical_json(const json& obj) {
  if (!obj.is_object()) throw Malformed{};
  Post post;
  auto id = obj.find("post_id");
  auto author = obj.find("author_id");
  auto ts = obj.find("timestamp");
  if (id == obj.end() || author == obj.end() || ts == obj.end()) throw Malformed{};
  post.post_id = key_from_json(*id);
  post.author_id = key_from_json(*author);
  post.timestamp = timestamp_from_json(*ts);
  if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Malformed{};
    post.text = it->get<std::string>();
  }
  post.hashtags = string_list(obj, "hashtags");
  post.mentioned_ids = string_list(obj, "mentioned_ids");
  post.urls = string_list(obj, "urls");
  post.reposted_post_id = optional_key(obj, "reposted_post_id");
  post.reposted_author_id = optional_key(obj, "reposted_author_id");
  post.replied_post_id = optional_key(obj, "replied_post_id");
  post.replied_author_id = optional_key(obj, "replied_author_id");
  post.quoted_post_id = optional_key(obj, "quoted_post_id");
  post.quoted_author_id = optional_key(obj, "quoted_author_id");
  if (auto it = obj.find("profile_default_image"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw Malformed{};
    post.profile_default_image = it->get<bool>();
  }
  if (auto it = obj.find("profile_description"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Malformed{};
    post.profile_description = it->get<std::string>();
  }
  if (auto it = obj.find("profile_url"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Malformed{};
    post.profile_url = it->get<std::string>();
  }
  finish_post(post);
  return post;
}

// "Wed Oct 10 20:19:24 +0000 2018"
Timestamp parse_twitter_date(const std::string& s) {
  std::tm tm{};
  std::istringstream in(s);
  std::string weekday, month, zone;
  int day = 0, year = 0;
  char colon1 = 0, colon2 = 0;
  in >> weekday >> month >> day >> tm.tm_hour >> colon1 >> tm.tm_min >> colon2 >> tm.tm_sec >> zone >> year;
  static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  int mon = -1;
  for (int i = 0; i < 12; ++i)
    if (month == months[i]) mon = i;
  if (!in || mon < 0 || colon1 != ':' || colon2 != ':' || zone.size() != 5) throw Malformed{};
  tm.tm_mday = day;
  tm.tm_mon = mon;
  tm.tm_year = year - 1900;
  Timestamp t = timegm(&tm);
  int offset = std::stoi(zone.substr(1, 2)) * 3600 + std::stoi(zone.substr(3, 2)) * 60;
  return zone[0] == '-' ? t + offset : t - offset;
}

Post post_from_twitter_json(const json& tw) {
  if (!tw.is_object()) throw Malformed{};
  Post post;
  post.post_id = tw.contains("id_str") ? key_from_json(tw["id_str"]) : key_from_json(tw.at("id"));
  const auto& user = tw.at("user");
  post.author_id = user.contains("id_str") ? key_from_json(user["id_str"]) : key_from_json(user.at("id"));
  if (tw.contains("timestamp_ms")) {
    post.timestamp = timestamp_from_json(tw["timestamp_ms"]) / 1000;
  } else {
    post.timestamp = parse_twitter_date(tw.at("created_at").get<std::string>());
  }
  if (tw.contains("full_text")) post.text = tw["full_text"].get<std::string>();
  else if (tw.contains("text")) post.text = tw["text"].get<std::string>();

  // Retweets carry the original's entities; the retweet itself is what we record.
  const json& source = tw.contains("retweeted_status") ? tw["retweeted_status"] : tw;
  if (auto ent = source.find("entities"); ent != source.end()) {
    for (const auto& h : ent->value("hashtags", json::array())) post.hashtags.push_back(h.at("text").get<std::string>());
    for (const auto& m : ent->value("user_mentions", json::array())) post.mentioned_ids.push_back(key_from_json(m.at("id_str")));
    for (const auto& u : ent->value("urls", json::array())) {
      if (u.contains("expanded_url") && u["expanded_url"].is_string()) post.urls.push_back(u["expanded_url"].get<std::string>());
      else if (u.contains("url")) post.urls.push_back(u["url"].get<std::string>());
    }
  }
  if (auto rt = tw.find("retweeted_status"); rt != tw.end() && rt->is_object()) {
    post.reposted_post_id = key_from_json(rt->at("id_str"));
    post.reposted_author_id = key_from_json(rt->at("user").at("id_str"));
  }
  post.replied_post_id = optional_key(tw, "in_reply_to_status_id_str");
  post.replied_author_id = optional_key(tw, "in_reply_to_user_id_str");
  post.quoted_post_id = optional_key(tw, "quoted_status_id_str");
  if (auto q = tw.find("quoted_status"); q != tw.end() && q->is_object() && q->contains("user"))
    post.quoted_author_id = key_from_json((*q)["user"].at("id_str"));
  if (user.contains("default_profile_image") && user["default_profile_image"].is_boolean())
    post.profile_default_image = user["default_profile_image"].get<bool>();
  if (user.contains("description") && user["description"].is_string())
    post.profile_description = user["description"].get<std::string>();
  if (user.contains("url") && user["url"].is_string()) post.profile_url = user["url"].get<std::string>();
  finish_post(post);
  return post;
}

std::vector<std::string> split_list_cell(const std::string& cell) {
  std::vector<std::string> out;
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto bar = cell.find('|', start);
    out.push_back(cell.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string join_list_cell(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back('|');
    out += items[i];
  }
  return out;
}

class Accumulator {
 public:
  void add(Post post) {
    if (!seen_.insert(post.post_id).second) {
      ++result_.skipped;
      return;
    }
    result_.posts.push_back(std::move(post));
  }
  void skip() { ++result_.skipped; }

  ParseResult finish() && {
    if (result_.posts.empty())
      throw EmptyCorpusError(fmt::format("corpus contains no valid records ({} malformed)", result_.skipped));
    std::stable_sort(result_.posts.begin(), result_.posts.end(),
                     [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
    return std::move(result_);
  }

 private:
  ParseResult result_;
  std::unordered_set<std::string> seen_;
};

ParseResult parse_jsonl(std::istream& in, bool twitter) {
  Accumulator acc;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json obj = json::parse(line);
      acc.add(twitter ? post_from_twitter_json(obj) : post_from_canonical_json(obj));
    } catch (const Malformed&) {
      acc.skip();
    } catch (const json::exception&) {
      acc.skip();
    } catch (const std::invalid_argument&) {
      acc.skip();
    } catch (const std::out_of_range&) {
      acc.skip();
    }
  }
  if (in.bad()) throw IoError("failed reading post stream");
  return std::move(acc).finish();
}

ParseResult parse_csv(std::istream& in) {
  Accumulator acc;
  csv::Row header;
  if (!csv::read_row(in, header)) throw EmptyCorpusError("corpus contains no valid records (no header)");
  auto col = [&](std::string_view name) -> long {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<long>(i);
    return -1;
  };
  long c_id = col("post_id"), c_author = col("author_id"), c_ts = col("timestamp");
  if (c_id < 0 || c_author < 0 || c_ts < 0)
    throw IoError("canonical CSV header must contain post_id, author_id and timestamp");
  long c_text = col("text"), c_tags = col("hashtags"), c_mentions = col("mentioned_ids"), c_urls = col("urls");
  long c_rp = col("reposted_post_id"), c_ra = col("reposted_author_id");
  long c_yp = col("replied_post_id"), c_ya = col("replied_author_id");
  long c_qp = col("quoted_post_id"), c_qa = col("quoted_author_id");
  long c_img = col("profile_default_image"), c_desc = col("profile_description"), c_purl = col("profile_url");

  csv::Row row;
  while (csv::read_row(in, row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    try {
      if (row.size() != header.size()) throw Malformed{};
      auto cell = [&](long c) -> const std::string& {
        static const std::string empty;
        return c < 0 ? empty : row[static_cast<std::size_t>(c)];
      };
      auto opt = [&](long c) -> std::optional<std::string> {
        if (cell(c).empty()) return std::nullopt;
        return cell(c);
      };
      Post post;
      post.post_id = cell(c_id);
      post.author_id = cell(c_author);
      const auto& ts = cell(c_ts);
      if (ts.empty() || !std::all_of(ts.begin(), ts.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw Malformed{};
      post.timestamp = std::stoll(ts);
      post.text = cell(c_text);
      post.hashtags = split_list_cell(cell(c_tags));
      post.mentioned_ids = split_list_cell(cell(c_mentions));
      post.urls = split_list_cell(cell(c_urls));
      post.reposted_post_id = opt(c_rp);
      post.reposted_author_id = opt(c_ra);
      post.replied_post_id = opt(c_yp);
      post.replied_author_id = opt(c_ya);
      post.quoted_post_id = opt(c_qp);
      post.quoted_author_id = opt(c_qa);
      if (!cell(c_img).empty()) {
        auto v = ascii_lower(cell(c_img));
        if (v == "true" || v == "1") post.profile_default_image = true;
        else if (v == "false" || v == "0") post.profile_default_image = false;
        else throw Malformed{};
      }
      post.profile_description = opt(c_desc);
      post.profile_url = opt(c_purl);
      finish_post(post);
      acc.add(std::move(post));
    } catch (const Malformed&) {
      acc.skip();
    } catch (const std::out_of_range&) {
      acc.skip();
    }
  }
  if (in.bad()) throw IoError("failed reading post stream");
  return std::move(acc).finish();
}

}  // namespace

InputFormat input_format_from_string(std::string_view name) {
  if (name == "canonical-jsonl") return InputFormat::CanonicalJsonl;
  if (name == "canonical-csv") return InputFormat::CanonicalCsv;
  if (name == "twitter-v1.1") return InputFormat::TwitterV11;
  throw ContractError(fmt::format("unknown input format '{}' (expected canonical-jsonl, canonical-csv or twitter-v1.1)", name));
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::CanonicalJsonl: return "canonical-jsonl";
    case InputFormat::CanonicalCsv: return "canonical-csv";
    case InputFormat::TwitterV11: return "twitter-v1.1";
  }
  return "?";
}

ParseResult parse_posts(std::istream& in, InputFormat format) {
  if (!in) throw IoError("post stream is not readable");
  switch (format) {
    case InputFormat::CanonicalJsonl: return parse_jsonl(in, false);
    case InputFormat::TwitterV11: return parse_jsonl(in, true);
    case InputFormat::CanonicalCsv: return parse_csv(in);
  }
  throw ContractError("unsupported input format");
}

ParseResult parse_posts_file(const std::string& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return parse_posts(in, format);
}

std::string url_hostname(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos || scheme == 0) return "";
  for (char c : url.substr(0, scheme))
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return "";
  auto rest = url.substr(scheme + 3);
  auto end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return "";
    return ascii_lower(authority.substr(0, close + 1));
  }
  if (auto colon = authority.find(':'); colon != std::string_view::npos) authority = authority.substr(0, colon);
  if (authority.empty()) return "";
  for (char c : authority)
    if (std::isspace(static_cast<unsigned char>(c))) return "";
  return ascii_lower(authority);
}

void write_post_jsonl(std::ostream& out, const Post& post) {
  json obj = json::object();
  obj["post_id"] = post.post_id;
  obj["author_id"] = post.author_id;
  obj["timestamp"] = post.timestamp;
  obj["text"] = post.text;
  obj["hashtags"] = post.hashtags;
  obj["mentioned_ids"] = post.mentioned_ids;
  obj["urls"] = post.urls;
  obj["domains"] = post.domains;
  auto put = [&](const char* name, const std::optional<std::string>& v) {
    if (v) obj[name] = *v;
  };
  put("reposted_post_id", post.reposted_post_id);
  put("reposted_author_id", post.reposted_author_id);
  put("replied_post_id", post.replied_post_id);
  put("replied_author_id", post.replied_author_id);
  put("quoted_post_id", post.quoted_post_id);
  put("quoted_author_id", post.quoted_author_id);
  if (post.profile_default_image) obj["profile_default_image"] = *post.profile_default_image;
  put("profile_description", post.profile_description);
  put("profile_url", post.profile_url);
  // nlohmann::json orders keys alphabetically, which keeps output stable.
  out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

void write_posts_jsonl(std::ostream& out, const std::vector<Post>& posts) {
  for (const auto& p : posts) write_post_jsonl(out, p);
}

const std::vector<std::string>& canonical_csv_columns() {
  static const std::vector<std::string> columns = {
      "post_id", "author_id", "timestamp", "text", "hashtags", "mentioned_ids", "urls",
      "reposted_post_id", "reposted_author_id", "replied_post_id", "replied_author_id",
      "quoted_post_id", "quoted_author_id", "profile_default_image", "profile_description", "profile_url"};
  return columns;
}

void write_posts_csv(std::ostream& out, const std::vector<Post>& posts) {
  csv::write_row(out, canonical_csv_columns());
  for (const auto& p : posts) {
    auto o = [](const std::optional<std::string>& v) { return v.value_or(""); };
    csv::write_row(out, {p.post_id, p.author_id, std::to_string(p.timestamp), p.text,
                         join_list_cell(p.hashtags), join_list_cell(p.mentioned_ids), join_list_cell(p.urls),
                         o(p.reposted_post_id), o(p.reposted_author_id), o(p.replied_post_id),
                         o(p.replied_author_id), o(p.quoted_post_id), o(p.quoted_author_id),
                         p.profile_default_image ? (*p.profile_default_image ? "true" : "false") : "",
                         o(p.profile_description), o(p.profile_url)});
  }
}

ConversationRoots resolve_conversations(const std::vector<Post>& posts) {
  std::unordered_map<std::string_view, const Post*> by_id;
  by_id.reserve(posts.size());
  for (const auto& p : posts) by_id.emplace(p.post_id, &p);

  ConversationRoots roots;
  roots.reserve(posts.size());
  std::vector<std::string_view> path;
  std::unordered_set<std::string_view> on_path;
  for (const auto& start : posts) {
    if (roots.count(start.post_id)) continue;
    path.clear();
    on_path.clear();
    std::string root;
    std::string_view cur = start.post_id;
    while (true) {
      if (auto known = roots.find(std::string(cur)); known != roots.end()) {
        root = known->second;
        break;
      }
      if (!on_path.insert(cur).second) {
        root = std::string(cur);  // first revisited post
        break;
      }
      path.push_back(cur);
      auto it = by_id.find(cur);
      const Post& post = *it->second;
      if (!post.replied_post_id) {
        root = std::string(cur);
        break;
      }
      std::string_view parent = *post.replied_post_id;
      if (!by_id.count(parent)) {
        root = std::string(parent);  // dangling parent
        break;
      }
      cur = parent;
    }
    for (auto id : path) roots.emplace(std::string(id), root);
  }
  return roots;
}

std::vector<Interaction> extract_interactions(const Post& post, const ConversationRoots& roots) {
  std::vector<Interaction> out;
  auto emit = [&](InteractionKind kind, const std::string& target) {
    out.push_back({kind, post.author_id, target, post.timestamp, post.post_id});
  };
  if (post.reposted_post_id) emit(InteractionKind::Repost, *post.reposted_post_id);
  for (const auto& h : post.hashtags) emit(InteractionKind::Hashtag, h);
  for (std::size_t i = 0; i < post.urls.size(); ++i) {
    emit(InteractionKind::Url, post.urls[i]);
    const auto& host = i < post.domains.size() ? post.domains[i] : std::string();
    if (!host.empty()) emit(InteractionKind::Domain, host);
  }
  for (const auto& m : post.mentioned_ids) emit(InteractionKind::Mention, m);
  if (post.replied_post_id) {
    emit(InteractionKind::Reply, *post.replied_post_id);
    auto it = roots.find(post.post_id);
    emit(InteractionKind::Conv, it != roots.end() ? it->second : *post.replied_post_id);
  }
  if (post.quoted_post_id) emit(InteractionKind::Quote, *post.quoted_post_id);
  return out;
}

std::vector<Interaction> extract_interactions(const std::vector<Post>& posts, const ConversationRoots& roots) {
  std::vector<Interaction> out;
  out.reserve(posts.size() * 2);
  for (const auto& p : posts) {
    auto part = extract_interactions(p, roots);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::string_view to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Repost: return "REPOST";
    case InteractionKind::Hashtag: return "HASHTAG";
    case InteractionKind::Url: return "URL";
    case InteractionKind::Domain: return "DOMAIN";
    case InteractionKind::Mention: return "MENTION";
    case InteractionKind::Reply: return "REPLY";
    case InteractionKind::Conv: return "CONV";
    case InteractionKind::Quote: return "QUOTE";
  }
  return "?";
}

InteractionKind interaction_kind_from_string(std::string_view name) {
  for (auto k : {InteractionKind::Repost, InteractionKind::Hashtag, InteractionKind::Url, InteractionKind::Domain,
                 InteractionKind::Mention, InteractionKind::Reply, InteractionKind::Conv, InteractionKind::Quote})
    if (to_string(k) == name) return k;
  throw IoError(fmt::format("unknown interaction kind '{}'", name));
}

void write_interactions_csv(std::ostream& out, const std::vector<Interaction>& interactions) {
  csv::write_row(out, {"kind", "actor", "target", "timestamp", "source_post_id"});
  for (const auto& i : interactions)
    csv::write_row(out, {std::string(to_string(i.kind)), i.actor, i.target, std::to_string(i.timestamp), i.source_post_id});
}

std::vector<Interaction> read_interactions_csv(std::istream& in) {
  csv::Table table(in);
  auto c_kind = table.column("kind"), c_actor = table.column("actor"), c_target = table.column("target"),
       c_ts = table.column("timestamp"), c_src = table.column("source_post_id");
  std::vector<Interaction> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    if (row.size() != table.header().size()) throw IoError("interactions CSV row has wrong column count");
    out.push_back({interaction_kind_from_string(row[c_kind]), row[c_actor], row[c_target], std::stoll(row[c_ts]), row[c_src]});
  }
  return out;
}

}  // namespace findhccs
