#pragma once

#include "geoforge/plot_code.hpp"
#include "geoforge/relation.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace geoforge::metrics {

struct F1Report {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t intersection = 0;
    std::size_t predicted = 0;
    std::size_t truth = 0;
};

/// Over canonical unordered endpoint pairs. An empty side scores 0.
F1Report segment_f1(const schema::PlotCode& pred, const schema::PlotCode& truth);
F1Report f1_from_counts(std::size_t intersection, std::size_t predicted, std::size_t truth);

struct Sample {
    double score = 0.0;
    bool solved = false;
};

struct Bin {
    std::size_t index = 0;
    std::size_t size = 0;
    double min_score = 0.0;
    double max_score = 0.0;
    double accuracy = 0.0;
    std::vector<std::size_t> members;  // sample indices
};

/// Sorts by score (ties by index) and cuts k contiguous groups of floor(n/k),
/// the remainder going one each to the last bins. Throws BinningError.
std::vector<Bin> bin_by_score(const std::vector<Sample>& samples, std::size_t k);

struct CategoryMatch {
    std::size_t truth = 0;
    std::size_t predicted = 0;
    std::size_t matched = 0;
    bool correct = false;
};

struct AnnotationMatch {
    bool fully_correct = false;
    CategoryMatch right_angles;
    CategoryMatch lengths;
    CategoryMatch angles;
};

/// Angles match under vertex-fixed reversal, lengths under endpoint swap.
/// Values are compared after literal evaluation; a literal that does not
/// parse never matches.
AnnotationMatch annotation_match(const schema::Annotations& pred, const schema::Annotations& truth,
                                 const core::Tolerance& tol = {});

}  // namespace geoforge::metrics
