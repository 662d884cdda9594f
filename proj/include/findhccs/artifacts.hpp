#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace findhccs {

/// Files written into one output directory. Unless commit() is called, the
/// destructor removes everything this object wrote (and the directory, if it
/// created it and left it empty).
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir);
  ~ArtifactSet();

  ArtifactSet(const ArtifactSet&) = delete;
  ArtifactSet& operator=(const ArtifactSet&) = delete;

  /// Writes through a temporary file renamed into place once body returns.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body);
  void write_text(const std::string& name, std::string_view text);

  void commit() { committed_ = true; }
  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
  std::vector<std::filesystem::path> created_dirs_;
  bool committed_ = false;
};

std::ifstream open_input(const std::filesystem::path& path);

/// Path of a prior-stage artifact; throws IoError naming the stage that
/// produces it when missing.
std::filesystem::path require_artifact(const std::filesystem::path& dir, const std::string& name,
                                       std::string_view producing_stage);

}  // namespace findhccs
