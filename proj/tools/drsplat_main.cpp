// drsplat: synthetic scene generation, feature registration, PQ search
// and evaluation over the DRSG/DRSF/DRMD/DRPQ/DRPC formats.

#include "drsplat/bench.hpp"
#include "drsplat/eval.hpp"
#include "drsplat/io.hpp"
#include "drsplat/parallel.hpp"
#include "drsplat/pq.hpp"
#include "drsplat/query.hpp"
#include "drsplat/registration.hpp"
#include "drsplat/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;
using namespace drsplat;

namespace {

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

CameraRig rig_from_json(const json& j) {
    CameraRig rig;
    rig.views = j.value("views", rig.views);
    rig.radius = j.value("radius", rig.radius);
    rig.elevation = j.value("elevation", rig.elevation);
    rig.width = j.value("width", rig.width);
    rig.height = j.value("height", rig.height);
    rig.fov_deg = j.value("fov_deg", rig.fov_deg);
    if (j.contains("center"))
        for (int a = 0; a < 3; ++a)
            rig.center[a] = j["center"][a];
    return rig;
}

SceneSpec spec_from_json(const json& j) {
    SceneSpec s;
    s.seed = j.value("seed", s.seed);
    s.gaussian_count = j.value("gaussian_count", s.gaussian_count);
    s.label_count = j.value("label_count", s.label_count);
    s.dim = j.value("dim", s.dim);
    s.embedding_noise = j.value("embedding_noise", s.embedding_noise);
    s.layout_extent = j.value("layout_extent", s.layout_extent);
    s.cluster_spread = j.value("cluster_spread", s.cluster_spread);
    s.scale_min = j.value("scale_min", s.scale_min);
    s.scale_max = j.value("scale_max", s.scale_max);
    s.opacity_min = j.value("opacity_min", s.opacity_min);
    s.opacity_max = j.value("opacity_max", s.opacity_max);
    s.points_per_gaussian = j.value("points_per_gaussian", s.points_per_gaussian);
    if (j.contains("rig"))
        s.rig = rig_from_json(j["rig"]);
    return s;
}

Eigen::VectorXf vec_from_json(const json& arr) {
    Eigen::VectorXf v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = arr[i].get<float>();
    return v;
}

RegisteredScene load_registered(const std::string& scene_path,
                                const std::string& features_path,
                                const PQCodebook* cb) {
    RegisteredScene rs;
    rs.scene = read_scene(scene_path);
    const FeatureFile ff = read_features(features_path, cb);
    if (ff.count() != rs.scene.size())
        throw std::runtime_error("scene/features size mismatch");
    if (ff.is_pq())
        rs.codes = ff.codes;
    else
        rs.features = ff.full;
    for (std::size_t i = 0; i < rs.scene.size(); ++i)
        rs.survivor_map.push_back(static_cast<int>(i));
    return rs;
}

void scene_bounds(const Scene& scene, Vec3& lo, Vec3& hi) {
    lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    hi = -lo;
    for (const Gaussian3D& g : scene.gaussians) {
        const double pad = 3.0 * g.scale.maxCoeff();
        lo = lo.cwiseMin(g.center - Vec3::Constant(pad));
        hi = hi.cwiseMax(g.center + Vec3::Constant(pad));
    }
}

json iou_report(const std::vector<int>& pred, const std::vector<int>& gt,
                const std::vector<double>& d, int label_count) {
    json per_label = json::object();
    std::vector<double> defined;
    for (int l = 0; l < label_count; ++l) {
        auto iou = weighted_iou(pred, gt, d, l);
        if (iou) {
            per_label[std::to_string(l)] = *iou;
            defined.push_back(*iou);
        } else {
            per_label[std::to_string(l)] = nullptr;  // empty union, excluded
        }
    }
    double miou = 0.0;
    for (double v : defined)
        miou += v;
    if (!defined.empty())
        miou /= static_cast<double>(defined.size());
    json buckets = json::object();
    for (double tau : {0.15, 0.30, 0.45}) {
        int hits = 0;
        for (double v : defined)
            if (v > tau)
                ++hits;
        char key[16];
        std::snprintf(key, sizeof(key), "iou>%.2f", tau);
        buckets[key] = defined.empty() ? 0.0
                                       : static_cast<double>(hits) / defined.size();
    }
    return json{{"per_label_iou", per_label},
                {"miou", miou},
                {"accuracy_buckets", buckets},
                {"defined_labels", defined.size()}};
}

int run(int argc, char** argv) {
    CLI::App app{"Language-embedded Gaussian scenes with PQ search"};
    app.require_subcommand(1);

    // gen-scene
    auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic labeled scene");
    std::string gen_spec, gen_out_scene, gen_out_points, gen_out_labels;
    gen->add_option("--spec", gen_spec, "Scene spec JSON")->required();
    gen->add_option("--out-scene", gen_out_scene)->required();
    gen->add_option("--out-points", gen_out_points)->required();
    gen->add_option("--out-labels", gen_out_labels)->required();

    // render-masks
    auto* rm = app.add_subcommand("render-masks", "Synthesize a mask dataset");
    std::string rm_scene, rm_labels, rm_rig, rm_out;
    double rm_sigma = 0.05;
    uint64_t rm_seed = 0;
    rm->add_option("--scene", rm_scene)->required();
    rm->add_option("--labels", rm_labels, "Label embedding DRSF file")->required();
    rm->add_option("--rig", rm_rig, "Camera rig JSON")->required();
    rm->add_option("--sigma", rm_sigma);
    rm->add_option("--seed", rm_seed);
    rm->add_option("--out", rm_out)->required();

    // train-pq
    auto* tp = app.add_subcommand("train-pq", "Train a PQ codebook");
    std::string tp_db, tp_out;
    uint32_t tp_l = 128, tp_k = 256;
    uint64_t tp_seed = 0;
    tp->add_option("--db", tp_db, "Training vectors (DRSF, full mode)")->required();
    tp->add_option("--subvectors", tp_l);
    tp->add_option("--centroids", tp_k);
    tp->add_option("--seed", tp_seed);
    tp->add_option("--out", tp_out)->required();

    // register
    auto* reg = app.add_subcommand("register", "Register mask embeddings onto Gaussians");
    std::string reg_scene, reg_masks, reg_cb, reg_out;
    int reg_k = 20;
    reg->add_option("--scene", reg_scene)->required();
    reg->add_option("--masks", reg_masks)->required();
    reg->add_option("--topk", reg_k);
    reg->add_option("--codebook", reg_cb, "Optional DRPQ; output becomes PQ-coded");
    reg->add_option("--out", reg_out, "Output prefix (.drsg and .drsf appended)")->required();

    // query
    auto* qc = app.add_subcommand("query", "Score a scene against a query embedding");
    std::string q_scene, q_features, q_cb, q_query, q_mode = "cosine", q_out, q_scores;
    qc->add_option("--scene", q_scene)->required();
    qc->add_option("--features", q_features)->required();
    qc->add_option("--codebook", q_cb);
    qc->add_option("--query", q_query, "Query JSON")->required();
    qc->add_option("--mode", q_mode)->check(CLI::IsMember({"cosine", "relevancy"}));
    qc->add_option("--out", q_out)->required();
    qc->add_option("--scores-out", q_scores, "Optional f32 per-Gaussian score dump");

    // segment
    auto* sc = app.add_subcommand("segment", "Argmax label assignment");
    std::string s_scene, s_features, s_cb, s_labels, s_out;
    sc->add_option("--scene", s_scene)->required();
    sc->add_option("--features", s_features)->required();
    sc->add_option("--codebook", s_cb);
    sc->add_option("--labels", s_labels, "Label embedding DRSF file")->required();
    sc->add_option("--out", s_out)->required();

    // eval-iou
    auto* ei = app.add_subcommand("eval-iou", "Volume-weighted IoU vs pseudo labels");
    std::string ei_pred, ei_scene, ei_points, ei_mode = "affinity", ei_out;
    ei->add_option("--pred", ei_pred, "Segmentation JSON from `segment`")->required();
    ei->add_option("--scene", ei_scene)->required();
    ei->add_option("--gt-points", ei_points)->required();
    ei->add_option("--mode", ei_mode)->check(CLI::IsMember({"affinity", "paper-verbatim"}));
    ei->add_option("--out", ei_out)->required();

    // eval-voxel
    auto* ev = app.add_subcommand("eval-voxel", "Voxel-grid labeling and IoU");
    std::string ev_scene, ev_pred, ev_out;
    double ev_spacing = 0.0, ev_threshold = 1e-4;
    ev->add_option("--scene", ev_scene)->required();
    ev->add_option("--spacing", ev_spacing, "0 = bounding-box diagonal / 128");
    ev->add_option("--threshold", ev_threshold, "Relative density threshold");
    ev->add_option("--pred", ev_pred, "Optional segmentation JSON to compare");
    ev->add_option("--out", ev_out)->required();

    // sweep
    auto* sw = app.add_subcommand("sweep", "Threshold sweep: tau vs weighted IoU");
    std::string sw_scene, sw_features, sw_cb, sw_query, sw_out;
    int sw_label = 0, sw_steps = 50;
    sw->add_option("--scene", sw_scene)->required();
    sw->add_option("--features", sw_features)->required();
    sw->add_option("--codebook", sw_cb);
    sw->add_option("--query", sw_query)->required();
    sw->add_option("--label", sw_label, "Ground-truth label id for the query");
    sw->add_option("--steps", sw_steps);
    sw->add_option("--out", sw_out)->required();

    // bench-lut
    auto* bl = app.add_subcommand("bench-lut", "ADC vs full-precision scoring speed");
    std::size_t bl_n = 1000000;
    uint32_t bl_d = 512, bl_l = 128;
    int bl_reps = 10;
    uint64_t bl_seed = 0;
    bl->add_option("--n", bl_n);
    bl->add_option("--d", bl_d);
    bl->add_option("--l", bl_l);
    bl->add_option("--reps", bl_reps);
    bl->add_option("--seed", bl_seed);

    CLI11_PARSE(app, argc, argv);

    if (*gen) {
        const SceneSpec spec = spec_from_json(read_json(gen_spec));
        const GeneratedScene g = gen_scene(spec);
        write_scene(gen_out_scene, g.scene);
        write_point_cloud(gen_out_points, g.point_cloud);
        write_features_full(gen_out_labels, g.label_embeddings);
        std::cout << "wrote " << g.scene.size() << " gaussians, "
                  << g.point_cloud.size() << " points\n";
    } else if (*rm) {
        const Scene scene = read_scene(rm_scene);
        const FeatureFile labels = read_features(rm_labels);
        const CameraRig rig = rig_from_json(read_json(rm_rig));
        const MaskDataset ds = render_masks(scene, labels.full, rig, rm_sigma, rm_seed);
        write_mask_dataset(rm_out, ds);
        std::cout << "wrote " << ds.views.size() << " views, " << ds.mask_count()
                  << " masks\n";
    } else if (*tp) {
        const FeatureFile db = read_features(tp_db);
        if (db.is_pq())
            throw std::runtime_error("train-pq: database must be full-precision");
        const PQCodebook cb = train_codebook(db.full, tp_l, tp_k, tp_seed, max_threads());
        write_codebook(tp_out, cb);
        std::cout << "trained codebook D=" << cb.dim << " L=" << cb.subvectors
                  << " K=" << cb.centroids << "\n";
    } else if (*reg) {
        const Scene scene = read_scene(reg_scene);
        MaskDataset ds = read_mask_dataset(reg_masks);
        ds.validate();
        const WeightMatrix w = accumulate_weights(scene, ds, reg_k, {}, max_threads());
        const AggregatedFeatures agg = aggregate_features(w, ds.embeddings);
        if (agg.cancellation_warnings > 0)
            std::cerr << "warning: " << agg.cancellation_warnings
                      << " exact-cancellation aggregates left unassigned\n";
        const RegisteredScene rs = prune_unassigned(scene, agg);
        write_scene(reg_out + ".drsg", rs.scene);
        if (!reg_cb.empty()) {
            const PQCodebook cb = read_codebook(reg_cb);
            std::vector<PQCode> codes(rs.size());
            for (std::size_t i = 0; i < rs.size(); ++i)
                codes[i] = encode(rs.features.row(static_cast<Eigen::Index>(i)).transpose(), cb);
            write_features_pq(reg_out + ".drsf", codes, cb.dim);
        } else {
            write_features_full(reg_out + ".drsf", rs.features);
        }
        std::cout << "registered " << rs.size() << "/" << scene.size() << " gaussians\n";
    } else if (*qc) {
        PQCodebook cb;
        const bool has_cb = !q_cb.empty();
        if (has_cb)
            cb = read_codebook(q_cb);
        const RegisteredScene rs = load_registered(q_scene, q_features, has_cb ? &cb : nullptr);
        const json qj = read_json(q_query);
        QuerySpec spec;
        spec.embedding = vec_from_json(qj.at("embedding"));
        spec.threshold = qj.value("threshold", 0.5);
        if (qj.contains("canonicals"))
            for (const auto& c : qj["canonicals"])
                spec.canonicals.push_back(vec_from_json(c));
        ScoreVector scores;
        if (q_mode == "relevancy") {
            scores = relevancy_scores(rs, has_cb ? &cb : nullptr, spec);
        } else {
            spec.validate(false);
            scores = score_scene(rs, has_cb ? &cb : nullptr, spec.embedding);
        }
        const std::vector<int> selected = select_threshold(scores, spec.threshold);
        json out{{"mode", q_mode},
                 {"threshold", spec.threshold},
                 {"gaussian_count", rs.size()},
                 {"selected", selected},
                 {"selected_count", selected.size()}};
        if (!q_scores.empty()) {
            std::ofstream dump(q_scores, std::ios::binary);
            for (double v : scores) {
                const float f = static_cast<float>(v);
                dump.write(reinterpret_cast<const char*>(&f), sizeof(f));
            }
            out["scores_file"] = q_scores;
        }
        write_json(q_out, out);
    } else if (*sc) {
        PQCodebook cb;
        const bool has_cb = !s_cb.empty();
        if (has_cb)
            cb = read_codebook(s_cb);
        const RegisteredScene rs = load_registered(s_scene, s_features, has_cb ? &cb : nullptr);
        const FeatureFile lf = read_features(s_labels);
        std::vector<Eigen::VectorXf> queries;
        for (Eigen::Index l = 0; l < lf.full.rows(); ++l)
            queries.push_back(lf.full.row(l).transpose());
        const std::vector<int> labels = segment_argmax(rs, has_cb ? &cb : nullptr, queries);
        json counts = json::object();
        for (std::size_t l = 0; l < queries.size(); ++l) {
            const auto c = std::count(labels.begin(), labels.end(), static_cast<int>(l));
            counts[std::to_string(l)] = c;
        }
        write_json(s_out, json{{"label_count", queries.size()},
                               {"labels", labels},
                               {"per_label_counts", counts}});
    } else if (*ei) {
        const Scene scene = read_scene(ei_scene);
        const LabeledPointCloud pc = read_point_cloud(ei_points);
        const json pj = read_json(ei_pred);
        const std::vector<int> pred = pj.at("labels").get<std::vector<int>>();
        if (pred.size() != scene.size())
            throw std::runtime_error("eval-iou: prediction/scene size mismatch");
        const PseudoLabelMode mode = ei_mode == "paper-verbatim"
                                         ? PseudoLabelMode::kPaperVerbatim
                                         : PseudoLabelMode::kAffinity;
        const std::vector<int> gt = pseudo_label_gaussians(pc, scene, mode, max_threads());
        const std::vector<double> d = significant_scores(scene);
        json out = iou_report(pred, gt, d, pc.label_count);
        out["mode"] = ei_mode;
        write_json(ei_out, out);
    } else if (*ev) {
        const Scene scene = read_scene(ev_scene);
        int label_count = 0;
        for (const Gaussian3D& g : scene.gaussians)
            label_count = std::max(label_count, g.label + 1);
        if (label_count == 0)
            throw std::runtime_error("eval-voxel: scene has no labels");
        Vec3 lo, hi;
        scene_bounds(scene, lo, hi);
        const double spacing = ev_spacing > 0.0 ? ev_spacing : (hi - lo).norm() / 128.0;
        VoxelizeOptions opt;
        opt.density_threshold_rel = ev_threshold;
        opt.threads = max_threads();
        const VoxelGrid gt = voxelize_scene(scene, lo, hi, spacing, label_count, nullptr, opt);
        std::size_t occupied = 0;
        for (int l : gt.labels)
            if (l != kNoLabel)
                ++occupied;
        json out{{"dims", {gt.dims.x(), gt.dims.y(), gt.dims.z()}},
                 {"spacing", spacing},
                 {"occupied_voxels", occupied},
                 {"total_voxels", gt.cell_count()}};
        if (!ev_pred.empty()) {
            const json pj = read_json(ev_pred);
            const std::vector<int> pred = pj.at("labels").get<std::vector<int>>();
            if (pred.size() != scene.size())
                throw std::runtime_error("eval-voxel: prediction/scene size mismatch");
            const VoxelGrid pg =
                voxelize_scene(scene, lo, hi, spacing, label_count, &pred, opt);
            json per_label = json::object();
            for (int l = 0; l < label_count; ++l) {
                auto iou = voxel_iou(gt, pg, l);
                per_label[std::to_string(l)] = iou ? json(*iou) : json(nullptr);
            }
            out["voxel_per_label_iou"] = per_label;
            out["voxel_miou"] = voxel_mean_iou(gt, pg, label_count);
        }
        write_json(ev_out, out);
    } else if (*sw) {
        PQCodebook cb;
        const bool has_cb = !sw_cb.empty();
        if (has_cb)
            cb = read_codebook(sw_cb);
        const RegisteredScene rs =
            load_registered(sw_scene, sw_features, has_cb ? &cb : nullptr);
        const json qj = read_json(sw_query);
        const Eigen::VectorXf q = vec_from_json(qj.at("embedding"));
        const ScoreVector scores = score_scene(rs, has_cb ? &cb : nullptr, q);
        const std::vector<double> d = significant_scores(rs.scene);
        std::vector<int> gt(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            gt[i] = rs.scene.gaussians[i].label == sw_label ? 1 : 0;
        json curve = json::array();
        for (int s = 0; s <= sw_steps; ++s) {
            const double tau = static_cast<double>(s) / sw_steps;
            std::vector<int> pred(rs.size(), 0);
            for (int idx : select_threshold(scores, tau))
                pred[static_cast<std::size_t>(idx)] = 1;
            const auto iou = weighted_iou(pred, gt, d, 1);
            curve.push_back({{"tau", tau}, {"iou", iou ? json(*iou) : json(nullptr)}});
        }
        write_json(sw_out, json{{"label", sw_label}, {"curve", curve}});
    } else if (*bl) {
        const BenchLutResult r = bench_lut(bl_n, bl_d, bl_l, bl_reps, bl_seed);
        std::cout << "full_cosine: median " << r.full.median_ms << " ms, p95 "
                  << r.full.p95_ms << " ms, " << r.full.throughput_per_s << " vec/s\n"
                  << "adc_lut:     median " << r.adc.median_ms << " ms, p95 "
                  << r.adc.p95_ms << " ms, " << r.adc.throughput_per_s << " vec/s\n"
                  << "speedup: " << r.speedup << "x  top1 match: "
                  << (r.top1_full == r.top1_adc ? "yes" : "no") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
