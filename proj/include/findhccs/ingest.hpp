#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "findhccs/types.hpp"

namespace findhccs {

enum class InputFormat { CanonicalJsonl, CanonicalCsv, TwitterV11 };

InputFormat input_format_from_string(std::string_view name);
std::string_view to_string(InputFormat format);

struct ParseResult {
  std::vector<Post> posts;  // ascending timestamp, stable on input order
  std::size_t skipped = 0;  // malformed records
};

/// Parses a post corpus. Malformed records are skipped and counted; a corpus
/// with no valid record throws EmptyCorpusError, an unreadable stream IoError.
ParseResult parse_posts(std::istream& in, InputFormat format);
ParseResult parse_posts_file(const std::string& path, InputFormat format);

/// Hostname of a URL, lowercased; "" when it cannot be parsed.
std::string url_hostname(std::string_view url);

void write_post_jsonl(std::ostream& out, const Post& post);
void write_posts_jsonl(std::ostream& out, const std::vector<Post>& posts);

// The canonical CSV column order.
const std::vector<std::string>& canonical_csv_columns();
void write_posts_csv(std::ostream& out, const std::vector<Post>& posts);

using ConversationRoots = std::unordered_map<PostId, PostId>;

/// Maps every post to the root of its reply chain. A parent missing from the
/// corpus becomes the root key; a cycle is cut at the first revisited post.
ConversationRoots resolve_conversations(const std::vector<Post>& posts);

/// Decomposes posts into interaction primitives, in post order. Per post the
/// order is REPOST, HASHTAG*, (URL, DOMAIN)*, MENTION*, REPLY, CONV, QUOTE.
std::vector<Interaction> extract_interactions(const std::vector<Post>& posts,
                                              const ConversationRoots& roots);

std::vector<Interaction> extract_interactions(const Post& post, const ConversationRoots& roots);

void write_interactions_csv(std::ostream& out, const std::vector<Interaction>& interactions);
std::vector<Interaction> read_interactions_csv(std::istream& in);

}  // namespace findhccs
