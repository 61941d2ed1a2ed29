// Compares the serial evaluation reference against the OpenMP-parallel path
// on a generated corpus and reports wall-clock speedups.

#include <chrono>
#include <cstdio>
#include <string>

#include "nemo/corpus_gen.hpp"
#include "nemo/evaluation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double run_once(const nemo::Corpus& corpus, int jobs) {
    nemo::EvalOptions options;
    options.jobs = jobs;
    const auto start = std::chrono::steady_clock::now();
    const nemo::EvalReport report = nemo::evaluate(corpus, options);
    const auto stop = std::chrono::steady_clock::now();
    (void)report;
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::string preset = "dense";
    int max_jobs = 8;
    if (argc > 1) preset = argv[1];
    if (argc > 2) max_jobs = std::atoi(argv[2]);

    const nemo::CorpusConfig cfg = nemo::preset_config(preset);
    std::printf("generating %s corpus (%d pairs)...\n", preset.c_str(), cfg.n_users);
    const nemo::Corpus corpus = nemo::generate(cfg);

#ifdef _OPENMP
    std::printf("OpenMP enabled, %d hardware threads\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel runs fall back to serial\n");
#endif

    const double serial = run_once(corpus, 1);
    std::printf("%8s %12s %10s\n", "jobs", "wall(s)", "speedup");
    std::printf("%8d %12.3f %10.2f\n", 1, serial, 1.0);
    for (int jobs = 2; jobs <= max_jobs; jobs *= 2) {
        const double t = run_once(corpus, jobs);
        std::printf("%8d %12.3f %10.2f\n", jobs, t, serial / t);
    }

    // Sanity: parallel output must equal the serial reference.
    nemo::EvalOptions serial_opts;
    nemo::EvalOptions par_opts;
    par_opts.jobs = max_jobs;
    const bool equal = nemo::evaluate(corpus, serial_opts).to_json().dump() ==
                       nemo::evaluate(corpus, par_opts).to_json().dump();
    std::printf("parallel report equals serial reference: %s\n", equal ? "yes" : "NO");
    return equal ? 0 : 1;
}
