#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace findhccs {

using AccountId = std::string;
using PostId = std::string;
using Timestamp = std::int64_t;

// Unordered account pair stored with first < second.
using AccountPair = std::pair<AccountId, AccountId>;

inline AccountPair make_pair_key(AccountId a, AccountId b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

/// Base of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's preconditions or a configuration contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. a timestamp before the window origin).
class DomainError : public ContractError {
 public:
  using ContractError::ContractError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

/// One normalized social-media post.
struct Post {
  PostId post_id;
  AccountId author_id;
  Timestamp timestamp = 0;
  std::string text;
  std::vector<std::string> hashtags;  // lowercase, no '#'
  std::vector<AccountId> mentioned_ids;
  std::vector<std::string> urls;
  std::vector<std::string> domains;  // parallel to urls, "" when unparsable
  std::optional<PostId> reposted_post_id;
  std::optional<AccountId> reposted_author_id;
  std::optional<PostId> replied_post_id;
  std::optional<AccountId> replied_author_id;
  std::optional<PostId> quoted_post_id;
  std::optional<AccountId> quoted_author_id;

  // Optional profile snapshot carried by the post; absent means 0 in features.
  std::optional<bool> profile_default_image;
  std::optional<std::string> profile_description;
  std::optional<std::string> profile_url;

  bool operator==(const Post&) const = default;
};

enum class InteractionKind { Repost, Hashtag, Url, Domain, Mention, Reply, Conv, Quote };

std::string_view to_string(InteractionKind kind);
InteractionKind interaction_kind_from_string(std::string_view name);

struct Interaction {
  InteractionKind kind = InteractionKind::Repost;
  AccountId actor;
  std::string target;
  Timestamp timestamp = 0;
  PostId source_post_id;

  bool operator==(const Interaction&) const = default;
};

}  // namespace findhccs
