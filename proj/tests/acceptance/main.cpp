#include <cstdio>
#include <exception>

#include "spdc/validation/acceptance.hpp"

int main()
{
    try {
        auto const lib = spdc::MaterialLibrary::load_default();
        int failed = 0;
        spdc::validation::run_all(lib, [&](spdc::validation::CriterionResult const& r) {
            std::printf("%s\n", spdc::validation::format(r).c_str());
            std::fflush(stdout);
            failed += r.passed ? 0 : 1;
        });
        std::printf("%d of 10 criteria failed\n", failed);
        return failed == 0 ? 0 : 1;
    } catch (std::exception const& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
}
