// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace faceanim::io {

namespace {

using json = nlohmann::ordered_json;

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a [x,y,z] triple");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_hint = -1) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, std::max<Eigen::Index>(cols_hint, 0));
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
            throw ParseError("ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
}

json normalizer_to_json(const Normalizer& norm) {
    json j;
    j["centroid"] = vec3_to_json(norm.reference_centroid);
    j["scale"] = norm.reference_scale;
    j["remove_rotation"] = norm.remove_rotation;
    json shape = json::array();
    for (Eigen::Index i = 0; i < norm.reference_shape.cols(); ++i) {
        shape.push_back(vec3_to_json(norm.reference_shape.col(i)));
    }
    j["reference_shape"] = std::move(shape);
    return j;
}

Normalizer normalizer_from_json(const json& j) {
    Normalizer norm;
    norm.reference_centroid = vec3_from_json(j.at("centroid"));
    norm.reference_scale = j.at("scale").get<double>();
    norm.remove_rotation = j.at("remove_rotation").get<bool>();
    const auto& shape = j.at("reference_shape");
    norm.reference_shape.resize(3, static_cast<Eigen::Index>(shape.size()));
    for (std::size_t i = 0; i < shape.size(); ++i) {
        norm.reference_shape.col(static_cast<Eigen::Index>(i)) = vec3_from_json(shape[i]);
    }
    return norm;
}

json kernel_to_json(const kernel::KernelSpec& spec) {
    json j;
    j["kind"] = kernel::kernel_name(spec.kind);
    j["sigma"] = spec.sigma;
    j["degree"] = spec.degree;
    j["offset"] = spec.offset;
    return j;
}

kernel::KernelSpec kernel_from_json(const json& j) {
    kernel::KernelSpec spec;
    spec.kind = kernel::kernel_kind_from_name(j.at("kind").get<std::string>());
    spec.sigma = j.at("sigma").get<double>();
    spec.degree = j.at("degree").get<int>();
    spec.offset = j.at("offset").get<double>();
    return spec;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

FaceRig load_rig(const std::filesystem::path& path) {
    const json j = load_json_file(path);
    FaceRig rig;
    try {
        for (const auto& v : j.at("neutral_vertices")) {
            rig.neutral_vertices.push_back(vec3_from_json(v));
        }
        for (const auto& bs : j.at("blendshapes")) {
            Blendshape shape;
            shape.name = bs.at("name").get<std::string>();
            for (const auto& d : bs.at("deltas")) shape.deltas.push_back(vec3_from_json(d));
            rig.blendshapes.push_back(std::move(shape));
        }
        for (const auto& idx : j.at("feature_point_indices")) {
            rig.feature_point_indices.push_back(idx.get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    rig.validate();
    return rig;
}

void save_rig(const FaceRig& rig, const std::filesystem::path& path) {
    json j;
    json vertices = json::array();
    for (const auto& v : rig.neutral_vertices) vertices.push_back(vec3_to_json(v));
    j["neutral_vertices"] = std::move(vertices);
    json shapes = json::array();
    for (const auto& bs : rig.blendshapes) {
        json shape;
        shape["name"] = bs.name;
        json deltas = json::array();
        for (const auto& d : bs.deltas) deltas.push_back(vec3_to_json(d));
        shape["deltas"] = std::move(deltas);
        shapes.push_back(std::move(shape));
    }
    j["blendshapes"] = std::move(shapes);
    j["feature_point_indices"] = rig.feature_point_indices;
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<FeaturePointFrame> load_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<FeaturePointFrame> seq;
    std::string line;
    int line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("frame", 0) == 0) {
            columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
            continue;
        }
        std::vector<double> values;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": bad number '" + cell + "'");
            }
        }
        if (columns == 0) columns = values.size();
        if (values.size() != columns || (values.size() - 1) % 3 != 0) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected " + std::to_string(columns) + " columns, got " +
                             std::to_string(values.size()));
        }
        FeaturePointFrame frame;
        frame.time_index = static_cast<long>(values[0]);
        for (std::size_t i = 1; i + 2 < values.size() + 1; i += 3) {
            frame.points.emplace_back(values[i], values[i + 1], values[i + 2]);
        }
        seq.push_back(std::move(frame));
    }
    return seq;
}

void save_sequence(const std::vector<FeaturePointFrame>& seq, const std::filesystem::path& path) {
    std::ostringstream out;
    const std::size_t L = seq.empty() ? 0 : seq.front().points.size();
    out << "frame";
    for (std::size_t i = 0; i < L; ++i) {
        out << ",p" << i << "x,p" << i << "y,p" << i << "z";
    }
    out << "\n";
    for (const auto& frame : seq) {
        out << frame.time_index;
        for (const auto& p : frame.points) {
            out << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
                << format_double(p.z());
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

void save_model(const retarget::RetargetModel& model, const std::filesystem::path& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "kpls_retargeter";
    j["kernel"] = kernel_to_json(model.regressor.spec);
    j["source_points"] = model.source_points;
    j["target_points"] = model.target_points;
    j["components"] = model.regressor.components;
    j["source_normalizer"] = normalizer_to_json(model.source_normalizer);
    j["target_normalizer"] = normalizer_to_json(model.target_normalizer);
    json reg;
    reg["training_inputs"] = matrix_to_json(model.regressor.training_inputs);
    reg["T0"] = matrix_to_json(model.regressor.T0);
    reg["G"] = matrix_to_json(model.regressor.G);
    reg["U"] = matrix_to_json(model.regressor.U);
    reg["K0"] = matrix_to_json(model.regressor.K0);
    reg["gram_row_means"] = vector_to_json(model.regressor.gram_row_means);
    reg["gram_grand_mean"] = model.regressor.gram_grand_mean;
    reg["target_mean"] = vector_to_json(model.regressor.target_mean);
    j["regressor"] = std::move(reg);
    write_text_file(path, j.dump(2) + "\n");
}

retarget::RetargetModel load_model(const std::filesystem::path& path) {
    const json j = load_json_file(path);
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ParseError(path.string() + ": unsupported model format version " +
                             std::to_string(version));
        }
        retarget::RetargetModel model;
        model.source_points = j.at("source_points").get<int>();
        model.target_points = j.at("target_points").get<int>();
        model.source_normalizer = normalizer_from_json(j.at("source_normalizer"));
        model.target_normalizer = normalizer_from_json(j.at("target_normalizer"));
        const auto& reg = j.at("regressor");
        model.regressor.spec = kernel_from_json(j.at("kernel"));
        model.regressor.components = j.at("components").get<int>();
        model.regressor.training_inputs = matrix_from_json(reg.at("training_inputs"));
        model.regressor.T0 = matrix_from_json(reg.at("T0"));
        model.regressor.G = matrix_from_json(reg.at("G"));
        model.regressor.U = matrix_from_json(reg.at("U"));
        model.regressor.K0 = matrix_from_json(reg.at("K0"));
        model.regressor.gram_row_means = vector_from_json(reg.at("gram_row_means"));
        model.regressor.gram_grand_mean = reg.at("gram_grand_mean").get<double>();
        model.regressor.target_mean = vector_from_json(reg.at("target_mean"));
        kernel::finalize_kpls(model.regressor);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_reports(const std::vector<eval::CyclicReport>& reports,
                  const std::filesystem::path& report_path) {
    json out = json::array();
    for (const auto& r : reports) {
        json j;
        j["method"] = r.method;
        j["e_d"] = r.e_d;
        j["frame_count"] = r.frame_count;
        j["vertex_count"] = r.vertex_count;
        json per_frame = json::array();
        for (double e : r.per_frame_errors) per_frame.push_back(e);
        j["per_frame_errors"] = std::move(per_frame);
        out.push_back(std::move(j));
    }
    write_text_file(report_path, out.dump(2) + "\n");
}

void save_frame_errors(const std::vector<eval::CyclicReport>& reports,
                       const std::filesystem::path& csv_path) {
    std::ostringstream out;
    out << "frame,method,error\n";
    for (const auto& r : reports) {
        for (std::size_t t = 0; t < r.per_frame_errors.size(); ++t) {
            out << t << ',' << r.method << ',' << format_double(r.per_frame_errors[t]) << "\n";
        }
    }
    write_text_file(csv_path, out.str());
}

} // namespace faceanim::io
