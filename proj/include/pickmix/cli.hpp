#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pickmix/dataset.hpp"
#include "pickmix/index_store.hpp"

namespace pickmix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Corpus directory: manifest.json plus one mesh file per shape.
///   {"labels": [...], "shapes": [{"id", "name", "file", "params"?}]}
void write_corpus(const std::vector<GeneratedShape>& shapes, const std::filesystem::path& dir);
std::vector<CorpusEntry> read_corpus(const std::filesystem::path& dir);

}  // namespace pickmix::cli
