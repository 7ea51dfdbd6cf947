#pragma once

#include <set>
#include <string>
#include <vector>

#include "reconeval/core/error.hpp"
#include "reconeval/io/manifest.hpp"
#include "reconeval/io/model_bundle.hpp"

namespace reconeval {

struct FilterResult {
    DatasetManifest manifest;
    std::vector<std::string> warnings;
};

/// Keeps exactly the frames the SfM reconstruction registered: `included` is
/// set iff the frame's file name is a registered image name. Order and
/// entries are preserved; registered names missing from the manifest are
/// reported as warnings.
[[nodiscard]] inline FilterResult colmap_filter(const DatasetManifest& manifest, const ModelBundle& sparse_bundle) {
    if (sparse_bundle.source_kind != SourceKind::SparseSfM) {
        throw InvalidInputError("registration filtering needs a sparse SfM bundle");
    }
    std::set<std::string> registered;
    for (const auto& [id, frame] : sparse_bundle.scene.frames) registered.insert(frame.name);

    FilterResult out;
    out.manifest = manifest;
    std::set<std::string> in_manifest;
    for (auto& f : out.manifest.frames) {
        f.included = registered.contains(f.name);
        in_manifest.insert(f.name);
    }
    for (const auto& name : registered) {
        if (!in_manifest.contains(name)) {
            out.warnings.push_back("registered image '" + name + "' is not in the manifest");
        }
    }
    return out;
}

}  // namespace reconeval
