#pragma once

#include <string>
#include <vector>

#include "mdct/predict.hpp"
#include "mdct/probit.hpp"
#include "mdct/sampler.hpp"

namespace mdct {

/// Dataset CSV: header `s1[,s2],y,x_1..x_p`, one row per observation.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

BinaryDataset read_binary_dataset_csv(const std::string& path);

/// Truth sidecar CSV: `s1[,s2],w0`.
std::vector<double> read_truth_csv(const std::string& path, int dim);
void write_truth_csv(const std::string& path, const std::vector<Point>& locations,
                     const std::vector<double>& w0, int dim);

/// Prediction CSV: `s1[,s2],y_mean,y_median,y_lo95,y_hi95,w_mean,w_lo95,w_hi95`
/// plus `p_mean` for probit chains.
void write_prediction_csv(const std::string& path, const std::vector<Point>& points,
                          const std::vector<PredictionSummary>& summaries, int dim,
                          bool include_p_mean);

/// Chain checkpoint: plain-text header (key/value lines, `end_header`
/// terminator) followed by little-endian float64 records, one per stored
/// iteration, fields in the order gamma[p], sigma2, beta[n_basis], delta1,
/// delta[n_delta], eta. Layout is documented in the README.
void write_chain(const std::string& path, const ChainSamples& chain);
ChainSamples read_chain(const std::string& path);

}  // namespace mdct
