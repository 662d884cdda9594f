#include "findhccs/artifacts.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "findhccs/types.hpp"

namespace fs = std::filesystem;

namespace findhccs {

ArtifactSet::ArtifactSet(fs::path dir) : dir_(std::move(dir)) {
  std::vector<fs::path> missing;
  for (fs::path p = dir_; !p.empty() && !fs::exists(p); p = p.parent_path()) {
    missing.push_back(p);
    if (p == p.parent_path()) break;
  }
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
  created_dirs_.assign(missing.begin(), missing.end());  // deepest first
}

ArtifactSet::~ArtifactSet() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& name : written_) fs::remove(dir_ / name, ec);
  for (const auto& name : written_) {
    // Subdirectories such as report/ may be left empty.
    for (fs::path p = (dir_ / name).parent_path(); p != dir_ && fs::is_empty(p, ec); p = p.parent_path())
      fs::remove(p, ec);
  }
  for (const auto& d : created_dirs_)
    if (fs::is_directory(d, ec) && fs::is_empty(d, ec)) fs::remove(d, ec);
}

void ArtifactSet::write(const std::string& name, const std::function<void(std::ostream&)>& body) {
  const fs::path target = dir_ / name;
  const fs::path tmp = fs::path(target.string() + ".partial");
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    try {
      body(out);
    } catch (...) {
      out.close();
      fs::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError(fmt::format("write failed for '{}'", target.string()));
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    const std::string why = ec.message();
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot move '{}' into place: {}", target.string(), why));
  }
  if (std::find(written_.begin(), written_.end(), name) == written_.end()) written_.push_back(name);
}

void ArtifactSet::write_text(const std::string& name, std::string_view text) {
  write(name, [&](std::ostream& out) { out << text; });
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  return in;
}

fs::path require_artifact(const fs::path& dir, const std::string& name, std::string_view producing_stage) {
  fs::path p = dir / name;
  if (!fs::exists(p))
    throw IoError(fmt::format("missing artifact '{}' in '{}'; run the '{}' stage first", name, dir.string(),
                              producing_stage));
  return p;
}

}  // namespace findhccs
