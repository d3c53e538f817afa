#include "invsub/selftest.hpp"

#include <cstdio>

#include "invsub/fdesolve.hpp"
#include "invsub/fraccalc.hpp"
#include "invsub/jsonio.hpp"
#include "invsub/specfun.hpp"
#include "invsub/subspace.hpp"
#include "invsub/verify.hpp"

namespace invsub {

int run_selftests(bool verbose) {
    struct Entry {
        const char* name;
        int (*fn)(bool);
    };
    const Entry entries[] = {
        {"specfun", specfun::selftest},   {"fraccalc", fraccalc::selftest},
        {"subspace", subspace::selftest}, {"fdesolve", fdesolve::selftest},
        {"verify", verify::selftest},     {"jsonio", jsonio::selftest},
    };
    int module_index = 0;
    for (const Entry& e : entries) {
        ++module_index;
        if (verbose)
            std::printf("== %s ==\n", e.name);
        const int rc = e.fn(verbose);
        if (rc != 0) {
            std::fprintf(stderr, "selftest: %s failed (code %d)\n", e.name, rc);
            return module_index;
        }
        if (verbose)
            std::printf("%s: ok\n", e.name);
    }
    return 0;
}

}  // namespace invsub
