// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "faceanim/evaluation.hpp"
#include "faceanim/retarget.hpp"
#include "faceanim/rig.hpp"

namespace faceanim::io {

inline constexpr int kModelFormatVersion = 1;

// Rig files are a single JSON document: neutral_vertices, blendshapes
// (name + deltas), feature_point_indices.
FaceRig load_rig(const std::filesystem::path& path);
void save_rig(const FaceRig& rig, const std::filesystem::path& path);

// Sequences are CSV with header "frame,p0x,p0y,p0z,...", one row per
// frame, full round-trip precision.
std::vector<FeaturePointFrame> load_sequence(const std::filesystem::path& path);
void save_sequence(const std::vector<FeaturePointFrame>& seq, const std::filesystem::path& path);

// Versioned, self-describing retargeter container. Loading refuses
// unknown format versions.
void save_model(const retarget::RetargetModel& model, const std::filesystem::path& path);
retarget::RetargetModel load_model(const std::filesystem::path& path);

/// Serializes a double with enough digits to round-trip exactly.
std::string format_double(double v);

void save_reports(const std::vector<eval::CyclicReport>& reports,
                  const std::filesystem::path& report_path);
/// Per-frame error table, CSV columns: frame,method,error.
void save_frame_errors(const std::vector<eval::CyclicReport>& reports,
                       const std::filesystem::path& csv_path);

} // namespace faceanim::io
