#include "macsort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "macsort/assignment.hpp"
#include "macsort/errors.hpp"

namespace macsort {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

double ratio(double num, double den, double when_empty) { return den > 0.0 ? num / den : when_empty; }

void check_unique_ids(const TrackSequence& seq, const char* which) {
  for (int t = 0; t < seq.num_frames(); ++t) {
    std::set<int> seen;
    for (const auto& b : seq.frames[t]) {
      if (!seen.insert(b.id).second) {
        throw Error(ErrorCode::DuplicateId, std::string(which) + " frame " + std::to_string(t + 1) +
                                                " repeats id " + std::to_string(b.id));
      }
    }
  }
}

// Dense index for every id that appears anywhere in the sequence, in id order.
std::unordered_map<int, int> index_ids(const TrackSequence& seq) {
  std::set<int> ids;
  for (const auto& frame : seq.frames) {
    for (const auto& b : frame) ids.insert(b.id);
  }
  std::unordered_map<int, int> index;
  int k = 0;
  for (int id : ids) index[id] = k++;
  return index;
}

Eigen::MatrixXd iou_matrix(const std::vector<TrackedBox>& gt, const std::vector<TrackedBox>& pred) {
  Eigen::MatrixXd sim(gt.size(), pred.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) sim(i, j) = iou(gt[i].box, pred[j].box);
  }
  return sim;
}

const std::vector<TrackedBox>& frame_or_empty(const TrackSequence& seq, int t) {
  static const std::vector<TrackedBox> kEmpty;
  return t < seq.num_frames() ? seq.frames[t] : kEmpty;
}

struct HotaAtAlpha {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
};

class HotaEvaluator {
 public:
  HotaEvaluator(const TrackSequence& gt, const TrackSequence& pred)
      : gt_(gt), pred_(pred), gt_index_(index_ids(gt)), pred_index_(index_ids(pred)) {
    const auto ng = static_cast<Eigen::Index>(gt_index_.size());
    const auto np = static_cast<Eigen::Index>(pred_index_.size());
    gt_count_ = Eigen::VectorXd::Zero(ng);
    pred_count_ = Eigen::VectorXd::Zero(np);
    Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(ng, np);

    for (int t = 0; t < gt_.num_frames(); ++t) {
      const auto& g = gt_.frames[t];
      const auto& p = frame_or_empty(pred_, t);
      for (const auto& b : g) gt_count_(gt_index_.at(b.id)) += 1.0;
      for (const auto& b : p) pred_count_(pred_index_.at(b.id)) += 1.0;
      if (g.empty() || p.empty()) continue;
      const Eigen::MatrixXd sim = iou_matrix(g, p);
      const Eigen::VectorXd row_sum = sim.rowwise().sum();
      const Eigen::RowVectorXd col_sum = sim.colwise().sum();
      for (Eigen::Index i = 0; i < sim.rows(); ++i) {
        for (Eigen::Index j = 0; j < sim.cols(); ++j) {
          const double denom = row_sum(i) + col_sum(j) - sim(i, j);
          if (denom > kEps) {
            potential(gt_index_.at(g[i].id), pred_index_.at(p[j].id)) += sim(i, j) / denom;
          }
        }
      }
    }
    alignment_ = Eigen::MatrixXd::Zero(ng, np);
    for (Eigen::Index i = 0; i < ng; ++i) {
      for (Eigen::Index j = 0; j < np; ++j) {
        alignment_(i, j) = potential(i, j) / (gt_count_(i) + pred_count_(j) - potential(i, j));
      }
    }

    // The matching itself does not depend on the threshold; cache it per frame.
    for (int t = 0; t < gt_.num_frames(); ++t) {
      const auto& g = gt_.frames[t];
      const auto& p = frame_or_empty(pred_, t);
      FrameMatch fm;
      if (!g.empty() && !p.empty()) {
        const Eigen::MatrixXd sim = iou_matrix(g, p);
        CostMatrix score(sim.rows(), sim.cols());
        for (Eigen::Index i = 0; i < sim.rows(); ++i) {
          for (Eigen::Index j = 0; j < sim.cols(); ++j) {
            score(i, j) = -alignment_(gt_index_.at(g[i].id), pred_index_.at(p[j].id)) * sim(i, j);
          }
        }
        for (const auto& [i, j] : linear_assignment(score).matches) {
          fm.pairs.push_back({gt_index_.at(g[i].id), pred_index_.at(p[j].id), sim(i, j)});
        }
      }
      fm.num_gt = static_cast<long>(g.size());
      fm.num_pred = static_cast<long>(p.size());
      frames_.push_back(std::move(fm));
    }
  }

  HotaAtAlpha at(double alpha) const {
    Eigen::MatrixXd matches = Eigen::MatrixXd::Zero(gt_count_.size(), pred_count_.size());
    long tp = 0, fn = 0, fp = 0;
    for (const auto& fm : frames_) {
      long count = 0;
      for (const auto& pair : fm.pairs) {
        if (pair.sim >= alpha - kEps) {
          ++count;
          matches(pair.gt, pair.pred) += 1.0;
        }
      }
      tp += count;
      fn += fm.num_gt - count;
      fp += fm.num_pred - count;
    }
    double ass_sum = 0.0;
    for (Eigen::Index i = 0; i < matches.rows(); ++i) {
      for (Eigen::Index j = 0; j < matches.cols(); ++j) {
        const double c = matches(i, j);
        if (c > 0.0) ass_sum += c * c / (gt_count_(i) + pred_count_(j) - c);
      }
    }
    HotaAtAlpha r;
    r.deta = static_cast<double>(tp) / static_cast<double>(std::max(1L, tp + fn + fp));
    r.assa = ass_sum / static_cast<double>(std::max(1L, tp));
    r.hota = std::sqrt(r.deta * r.assa);
    return r;
  }

 private:
  struct Pair {
    int gt;
    int pred;
    double sim;
  };
  struct FrameMatch {
    std::vector<Pair> pairs;
    long num_gt = 0;
    long num_pred = 0;
  };

  const TrackSequence& gt_;
  const TrackSequence& pred_;
  std::unordered_map<int, int> gt_index_;
  std::unordered_map<int, int> pred_index_;
  Eigen::VectorXd gt_count_;
  Eigen::VectorXd pred_count_;
  Eigen::MatrixXd alignment_;
  std::vector<FrameMatch> frames_;
};

}  // namespace

void TrackSequence::add(int frame, int id, const BBox& box) {
  if (frame < 1) throw Error(ErrorCode::FrameMismatch, "frame numbers start at 1");
  if (static_cast<int>(frames.size()) < frame) frames.resize(frame);
  frames[frame - 1].push_back({id, box});
}

std::vector<std::pair<int, int>> match_frame(const std::vector<TrackedBox>& gt,
                                             const std::vector<TrackedBox>& pred,
                                             double iou_threshold, const std::map<int, int>& previous) {
  const Eigen::MatrixXd sim = iou_matrix(gt, pred);
  std::vector<std::pair<int, int>> pairs;
  std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

  for (std::size_t i = 0; i < gt.size(); ++i) {
    auto it = previous.find(gt[i].id);
    if (it == previous.end()) continue;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      if (!pred_used[j] && pred[j].id == it->second && sim(i, j) >= iou_threshold) {
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        gt_used[i] = 1;
        pred_used[j] = 1;
        break;
      }
    }
  }

  std::vector<int> rows, cols;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) rows.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < pred.size(); ++j) {
    if (!pred_used[j]) cols.push_back(static_cast<int>(j));
  }
  CostMatrix cost(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      const double s = sim(rows[a], cols[b]);
      cost(a, b) = s >= iou_threshold ? 1.0 - s : kInf;
    }
  }
  for (const auto& [a, b] : linear_assignment(cost).matches) pairs.emplace_back(rows[a], cols[b]);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

MetricsReport evaluate(const TrackSequence& gt, const TrackSequence& pred, const MetricsConfig& config) {
  if (!(config.iou_threshold > 0.0 && config.iou_threshold < 1.0)) {
    throw Error(ErrorCode::ConfigError, "iou_threshold must lie in (0, 1)");
  }
  check_unique_ids(gt, "gt");
  check_unique_ids(pred, "prediction");
  for (int t = gt.num_frames(); t < pred.num_frames(); ++t) {
    if (!pred.frames[t].empty()) {
      throw Error(ErrorCode::FrameMismatch, "prediction frame " + std::to_string(t + 1) +
                                                " is past the last gt frame " +
                                                std::to_string(gt.num_frames()));
    }
  }

  MetricsReport r;
  const auto gt_index = index_ids(gt);
  const auto pred_index = index_ids(pred);
  r.gt_tracks = static_cast<long>(gt_index.size());
  r.pred_tracks = static_cast<long>(pred_index.size());

  // CLEAR-MOT and per-pair identity overlap counts in one pass.
  std::map<int, int> last_match;
  std::vector<long> gt_len(gt_index.size(), 0), gt_hit(gt_index.size(), 0);
  Eigen::MatrixXd overlap_frames = Eigen::MatrixXd::Zero(gt_index.size(), pred_index.size());
  for (int t = 0; t < gt.num_frames(); ++t) {
    const auto& g = gt.frames[t];
    const auto& p = frame_or_empty(pred, t);
    r.num_gt += static_cast<long>(g.size());
    r.num_pred += static_cast<long>(p.size());
    for (const auto& b : g) ++gt_len[gt_index.at(b.id)];

    const auto pairs = match_frame(g, p, config.iou_threshold, last_match);
    for (const auto& [i, j] : pairs) {
      const int gid = g[i].id;
      const int pid = p[j].id;
      auto it = last_match.find(gid);
      if (it != last_match.end() && it->second != pid) ++r.id_switches;
      last_match[gid] = pid;
      ++gt_hit[gt_index.at(gid)];
    }
    r.tp += static_cast<long>(pairs.size());
    r.fn += static_cast<long>(g.size() - pairs.size());
    r.fp += static_cast<long>(p.size() - pairs.size());

    for (const auto& gb : g) {
      for (const auto& pb : p) {
        if (iou(gb.box, pb.box) >= config.iou_threshold) {
          overlap_frames(gt_index.at(gb.id), pred_index.at(pb.id)) += 1.0;
        }
      }
    }
  }

  const bool both_empty = r.num_gt == 0 && r.num_pred == 0;
  r.mota = both_empty ? 1.0
                      : 1.0 - static_cast<double>(r.fn + r.fp + r.id_switches) /
                                  static_cast<double>(std::max(1L, r.num_gt));
  for (std::size_t k = 0; k < gt_len.size(); ++k) {
    const double coverage = ratio(static_cast<double>(gt_hit[k]), static_cast<double>(gt_len[k]), 0.0);
    if (coverage >= 0.8) ++r.mostly_tracked;
    if (coverage <= 0.2) ++r.mostly_lost;
  }

  double idtp = 0.0;
  if (overlap_frames.size() > 0) {
    const Assignment ids = linear_assignment(-overlap_frames);
    for (const auto& [i, j] : ids.matches) idtp += overlap_frames(i, j);
  }
  const double empty_value = both_empty ? 1.0 : 0.0;
  r.idp = ratio(idtp, static_cast<double>(r.num_pred), empty_value);
  r.idr = ratio(idtp, static_cast<double>(r.num_gt), empty_value);
  r.idf1 = ratio(2.0 * idtp, static_cast<double>(r.num_gt + r.num_pred), empty_value);

  if (both_empty) {
    r.hota = r.deta = r.assa = 1.0;
  } else {
    const HotaEvaluator hota(gt, pred);
    if (config.hota_sweep) {
      int n = 0;
      for (int k = 1; k <= 19; ++k) {
        const HotaAtAlpha h = hota.at(0.05 * k);
        r.hota += h.hota;
        r.deta += h.deta;
        r.assa += h.assa;
        ++n;
      }
      r.hota /= n;
      r.deta /= n;
      r.assa /= n;
    } else {
      const HotaAtAlpha h = hota.at(config.iou_threshold);
      r.hota = h.hota;
      r.deta = h.deta;
      r.assa = h.assa;
    }
  }
  return r;
}

std::string report_to_text(const MetricsReport& r) {
  char buf[1024];
  std::snprintf(buf, sizeof(buf),
                "HOTA   %.4f\nDetA   %.4f\nAssA   %.4f\nMOTA   %.4f\nIDF1   %.4f\nIDP    %.4f\n"
                "IDR    %.4f\nIDSW   %ld\nMT     %ld\nML     %ld\nTP     %ld\nFP     %ld\nFN     %ld\n"
                "GT     %ld\nPRED   %ld\n",
                r.hota, r.deta, r.assa, r.mota, r.idf1, r.idp, r.idr, r.id_switches, r.mostly_tracked,
                r.mostly_lost, r.tp, r.fp, r.fn, r.num_gt, r.num_pred);
  return buf;
}

std::string report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j = {
      {"hota", r.hota},          {"deta", r.deta},
      {"assa", r.assa},          {"mota", r.mota},
      {"idf1", r.idf1},          {"idp", r.idp},
      {"idr", r.idr},            {"id_switches", r.id_switches},
      {"mostly_tracked", r.mostly_tracked}, {"mostly_lost", r.mostly_lost},
      {"tp", r.tp},              {"fp", r.fp},
      {"fn", r.fn},              {"num_gt", r.num_gt},
      {"num_pred", r.num_pred},  {"gt_tracks", r.gt_tracks},
      {"pred_tracks", r.pred_tracks},
  };
  return j.dump(2) + "\n";
}

}  // namespace macsort
