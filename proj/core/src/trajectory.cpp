#include "geoctl/trajectory.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "geoctl/errors.hpp"

namespace geoctl {

void Trajectory::append(double t, TangentState s) {
    if (!tau.empty() && !(t > tau.back()))
        throw Error("trajectory parameter must be strictly increasing");
    tau.push_back(t);
    states.push_back(std::move(s));
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().q.size());
    os << "tau";
    for (int i = 1; i <= n; ++i) os << ",q" << i;
    for (int i = 1; i <= n; ++i) os << ",v" << i;
    os << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_g17(traj.tau[k]);
        const TangentState& s = traj.states[k];
        for (int i = 0; i < n; ++i) os << "," << format_g17(s.q[i]);
        for (int i = 0; i < n; ++i) os << "," << format_g17(s.v[i]);
        os << "\n";
    }
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    return os.str();
}

}  // namespace geoctl
