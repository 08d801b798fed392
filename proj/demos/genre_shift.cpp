// A corpus drifting from one register to another: advection explains the frequency change.
#include <iostream>

#include "advect/advect.hpp"

using namespace advect;

int main() {
    synth::MixtureSpec spec;
    spec.topics = {{"acad", synth::make_words("acad", 300), synth::zipf_weights(300, 1.0, 10.0), {}},
                   {"spok", synth::make_words("spok", 300), synth::zipf_weights(300, 1.0, 10.0), {}}};
    spec.periods = {"early", "late"};
    spec.mixture = {{0.9, 0.1}, {0.1, 0.9}};
    spec.docs_per_period = 500;
    spec.doc_length_min = spec.doc_length_max = 500;
    spec.block_length = 100;
    spec.genre_by_topic = true;
    spec.seed = 11;
    auto corpus = synth::generate_mixture(spec).corpus;
    auto table = count_frequencies(corpus);

    auto dists = genre_distributions(corpus);
    std::cout << "genre divergence: " << genre_divergence(dists[1], dists[0]) << '\n';
    for (auto smoothing : {Smoothing::none(), Smoothing::adjacent()}) {
        AdvectionParams params;
        params.smoothing = smoothing;
        auto records = advection_series(corpus, table, params);
        auto fit = eval_r2(records, Grouping::pooled).front();
        std::cout << "smoothing " << smoothing.name() << ": n=" << fit.n << " R2=" << fit.r2.value_or(0.0) << '\n';
    }
}
