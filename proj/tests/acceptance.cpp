// Validation-suite driver: runs one criterion (--criterion N) or all of
// them, printing one report line each. Exit status 0 iff everything passed.
// Worker count comes from NQA_WORKERS (default 1) so the output stays
// reproducible on any machine.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "nqa/validate.hpp"

int main(int argc, char** argv) {
    int criterion = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            criterion = std::atoi(argv[++i]);

    int workers = 1;
    if (const char* w = std::getenv("NQA_WORKERS")) workers = std::atoi(w);
    const nqa::AdaptiveOptions opt = nqa::dynamics_options();

    std::vector<nqa::CriterionResult> results;
    switch (criterion) {
        case 0: results = nqa::run_validation(workers, opt); break;
        case 1: results.push_back(nqa::criterion_1(workers, opt)); break;
        case 2: results.push_back(nqa::criterion_2(workers)); break;
        case 3: results.push_back(nqa::criterion_3(workers, opt)); break;
        case 4: results.push_back(nqa::criterion_4(workers, opt)); break;
        case 5: results.push_back(nqa::criterion_5(workers, opt)); break;
        case 6: results.push_back(nqa::criterion_6(workers, opt)); break;
        case 7: results.push_back(nqa::criterion_7(workers, opt)); break;
        case 8: results.push_back(nqa::criterion_8(workers)); break;
        case 9: results.push_back(nqa::criterion_9(workers)); break;
        case 10: results.push_back(nqa::criterion_10(workers)); break;
        default:
            std::fprintf(stderr, "unknown criterion %d (expected 1..10)\n",
                         criterion);
            return 2;
    }

    bool all = true;
    for (const auto& r : results) {
        std::printf("%s\n", nqa::report_line(r).c_str());
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
