// Acceptance run: one PASS/FAIL line per criterion, details indented below.
//
//   acceptance [--workers N] [--out DIR]
//
// Exit status is 0 only if every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracres/app.hpp"

using namespace fracres;

namespace {

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        notes.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
        pass = pass && ok;
    }
    void note(const std::string& what) { notes.push_back("      " + what); }
};

template <class... A>
std::string fmt(const char* f, A... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Scan {
    RunConfig cfg;
    RunOutcome out;
    double step = 0.0;
    double seconds = 0.0;
};

Scan scan(const std::string& scenario, unsigned workers, const std::filesystem::path& dir) {
    Scan s;
    s.cfg = run_preset(scenario);
    s.cfg.sweep.workers = workers;
    s.cfg.out_dir = (dir / scenario).string();
    s.step = (s.cfg.sweep.omega_rep_max - s.cfg.sweep.omega_rep_min) / (s.cfg.sweep.grid_points - 1);
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    s.out = run(s.cfg, log);
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "  [" << scenario << "] " << s.out.spectrum.size() << " points in " << fmt("%.0f", s.seconds)
              << " s, " << s.out.spectrum.failures.size() << " failed" << std::endl;
    return s;
}

std::string spectrum_csv(const ResonanceSpectrum& s) {
    std::ostringstream os;
    write_spectrum_csv(os, s);
    return os.str();
}

std::size_t nearest_index(const ResonanceSpectrum& s, double w) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s.omega_rep[i] - w) < std::abs(s.omega_rep[best] - w)) best = i;
    return best;
}

// Peaks of the comb (base, 1, n) for n = 1..max_n; the label must exist and
// the location must lie within `tol` of base/n.
void check_comb(Verdict& v, const MatchReport& rep, double base, int max_n, double tol, const char* name,
                std::vector<const Peak*>* found = nullptr) {
    for (int n = 1; n <= max_n; ++n) {
        const Peak* p = find_matched(rep, base, 1, n);
        const double target = base / n;
        if (!p) {
            v.check(false, fmt("%s: no peak matched to %.6g", name, target));
            if (found) found->push_back(nullptr);
            continue;
        }
        const double d = std::abs(p->location - target);
        v.check(d <= tol, fmt("%s: peak at %.5f for %.5f", name, p->location, target) +
                              fmt(" (|d| = %.4f, limit %.4f)", d, tol));
        if (found) found->push_back(p);
    }
}

void list_peaks(Verdict& v, const MatchReport& rep, std::size_t limit = 12) {
    std::vector<Peak> by_height = rep.peaks;
    std::sort(by_height.begin(), by_height.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    std::string line = "largest peaks:";
    for (std::size_t i = 0; i < std::min(limit, by_height.size()); ++i)
        line += fmt(" %.4f(%.3g)", by_height[i].location, by_height[i].height);
    v.note(line);
}

struct Physicality {
    double worst_trace = 0.0;
    double worst_eig = std::numeric_limits<double>::infinity();
    std::size_t points = 0;

    void add(const ResonanceSpectrum& s) {
        for (const auto& o : s.observables) {
            if (!o) continue;
            worst_trace = std::max(worst_trace, o->max_trace_drift);
            worst_eig = std::min(worst_eig, o->min_eigenvalue);
            ++points;
        }
    }
};

double rabi_error() {
    SystemParams p;
    p.gamma_ab = p.gamma_ac = p.gamma_bc = 0.0;
    p.rabi_ac = 1.0;
    p.rabi_bc = p.rabi_acb = p.rabi_bca = 0.0;
    IntegrateOptions o;
    o.sample_dt = std::numbers::pi / 128;
    const Trajectory tr =
        integrate(DensityState::ground_a(), std::numbers::pi, p, DriveEnvelope::cw(), DriveEnvelope::cw(), o);
    double e = 1.0 - tr.states.back().rho_aa;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double c = std::cos(tr.times[k]);
        e = std::max(e, std::abs(tr.states[k].rho_aa - c * c));
    }
    return e;
}

void report(int n, const std::string& title, const Verdict& v, int& failures) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << '\n';
    for (const auto& s : v.notes) std::cout << "    " << s << '\n';
    if (!v.pass) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
    unsigned workers = 8;
    std::filesystem::path out = "acceptance_out";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--workers" && i + 1 < argc) {
            workers = static_cast<unsigned>(std::max(1, std::atoi(argv[++i])));
        } else if (a == "--out" && i + 1 < argc) {
            out = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--workers N] [--out DIR]\n";
            return 2;
        }
    }

    std::cout << "running scans (" << workers << " workers, artifacts in " << out.string() << ")\n";
    const Scan fig2 = scan("fig2", workers, out);
    const Scan fig3 = scan("fig3", workers, out);
    const Scan fig5 = scan("fig5", workers, out);
    const Scan classical = scan("classical", workers, out);
    const Scan fig2_serial = scan("fig2", 1, out / "serial");

    int failures = 0;
    const double omega_ab = 11.0;

    // 1: subharmonic comb
    {
        Verdict v;
        std::vector<const Peak*> found;
        check_comb(v, fig2.out.report, omega_ab, 4, fig2.step / 2, "w_ab/n", &found);
        for (std::size_t n = 1; n < found.size(); ++n)
            if (found[n - 1] && found[n])
                v.check(found[n]->height < found[n - 1]->height,
                        fmt("height(n=%.0f) = %.4g < height(n-1) = %.4g", n + 1.0, found[n]->height,
                            found[n - 1]->height));
        v.note(fmt("runtime %.0f s (target < 300 s)", fig2.seconds));
        list_peaks(v, fig2.out.report);
        report(1, "subharmonic comb w_ab/n in the fig2 scan", v, failures);
    }

    // 2: combination resonances
    const Peak* sum_peak = find_matched(fig3.out.report, 12.0, 1, 1);
    const Peak* diff_peak = find_matched(fig3.out.report, 10.0, 1, 1);
    {
        Verdict v;
        check_comb(v, fig3.out.report, 12.0, 2, fig3.step / 2, "(w_ab+W_ac)/n");
        check_comb(v, fig3.out.report, 10.0, 2, fig3.step / 2, "(w_ab-W_ac)/n");
        list_peaks(v, fig3.out.report);
        report(2, "combination resonances |w_ab +- W_ac|/n in the fig3 scan", v, failures);
    }

    // 3: coherent population trapping
    {
        Verdict v;
        double lowest = 1.0, at = 0.0;
        std::size_t ok = 0;
        const ResonanceSpectrum& s = fig3.out.spectrum;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s.observables[i]) continue;
            ++ok;
            if (s.observables[i]->mean_pops[1] < lowest) {
                lowest = s.observables[i]->mean_pops[1];
                at = s.omega_rep[i];
            }
        }
        v.check(ok > 0, fmt("%.0f of %.0f points integrated", double(ok), double(s.size())));
        v.check(lowest > cpt_population_threshold, fmt("min mean rho_bb = %.4f at w_rep = %.4f", lowest, at));
        report(3, "CPT: mean rho_bb > 0.6 across the fig3 scan", v, failures);
    }

    // 4: GWI at the combination peaks, ADI away from every resonance
    {
        Verdict v;
        const ResonanceSpectrum& s = fig3.out.spectrum;
        for (const auto& [name, p] : {std::pair{"sum", sum_peak}, std::pair{"difference", diff_peak}}) {
            if (!p) {
                v.check(false, std::string("no matched n=1 ") + name + " peak");
                continue;
            }
            const auto& o = s.observables[nearest_index(s, p->location)];
            if (!o) {
                v.check(false, std::string(name) + " peak point failed to integrate");
                continue;
            }
            v.check(o->absorption_probe < 0.0 && o->inversion_probe < 0.0,
                    std::string(name) + fmt(" peak %.4f: abs_probe = %.4g, inv_probe = %.4g", p->location,
                                           o->absorption_probe, o->inversion_probe));
        }
        // widest matched n=1 peak sets the exclusion radius
        double fwhm = 0.0;
        for (const Peak* p : {sum_peak, diff_peak})
            if (p) fwhm = std::max(fwhm, p->fwhm);
        if (fwhm == 0.0)
            for (const auto& p : fig3.out.report.peaks) fwhm = std::max(fwhm, p.fwhm);
        double best_dist = -1.0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s.observables[i]) continue;
            double d = std::numeric_limits<double>::infinity();
            for (const auto& e : fig3.out.predicted.entries) d = std::min(d, std::abs(s.omega_rep[i] - e.frequency));
            if (d > best_dist) {
                best_dist = d;
                best = i;
            }
        }
        const bool far = fwhm > 0.0 && best_dist >= 10.0 * fwhm;
        v.check(far, fmt("point w_rep = %.4f is %.3f from every prediction; 10 FWHM = %.3f", s.omega_rep[best],
                         best_dist, 10.0 * fwhm));
        if (far) {
            const auto& o = s.observables[best];
            v.check(o->absorption_pump > 0.0 && o->inversion_pump > 0.0,
                    fmt("abs_pump = %.4g, inv_pump = %.4g", o->absorption_pump, o->inversion_pump));
        }
        report(4, "GWI on the probe at combination peaks, ADI on the pump away from them", v, failures);
    }

    // 5: rational comb
    {
        Verdict v;
        const MatchReport& rep = fig5.out.report;
        const Peak* main = find_matched(rep, omega_ab, 1, 1);
        v.check(main != nullptr, "n=1 main peak matched" + (main ? fmt(" at %.4f", main->location) : std::string()));
        for (const auto& [m, n] : {std::pair{1, 2}, std::pair{2, 5}, std::pair{2, 3}}) {
            const double target = omega_ab * m / n;
            const Peak* p = find_matched(rep, omega_ab, m, n);
            if (!p) {
                v.check(false, fmt("no peak within 2%% of %d/%d w_ab", m, n) + fmt(" = %.4f", target));
                continue;
            }
            v.check(std::abs(p->location - target) <= 0.02 * target,
                    fmt("%d/%d w_ab", m, n) + fmt(": peak %.4f for %.4f", p->location, target));
            if (main)
                v.check(p->height < main->height, fmt("height %.4g < main %.4g", p->height, main->height));
        }
        const Peak* main2 = find_matched(fig2.out.report, omega_ab, 1, 1);
        if (main && main2)
            v.check(main->fwhm < main2->fwhm, fmt("fwhm fig5 %.4f < fig2 %.4f", main->fwhm, main2->fwhm));
        else
            v.check(false, "n=1 peak missing in fig5 or fig2 for the width comparison");
        list_peaks(v, rep);
        report(5, "rational comb m w_ab/n in the fig5 scan", v, failures);
    }

    // 6: classical oracle through the same pipeline
    {
        Verdict v;
        const double w0 = classical.cfg.oscillator.omega0, b = classical.cfg.oscillator.damping;
        std::vector<const Peak*> found;
        check_comb(v, classical.out.report, w0, 4, classical.step / 2, "w0/n", &found);
        for (int n = 1; n <= 4; ++n) {
            const Peak* p = found[static_cast<std::size_t>(n - 1)];
            if (!p) continue;
            const std::size_t i = nearest_index(classical.out.spectrum, p->location);
            const double w = classical.out.spectrum.omega_rep[i];
            const double td = classical.out.spectrum.observables[i]->osc_amplitude_bc;
            const double an = classical_amplitude_analytic({w0, b, rep_rate_to_period(w)});
            v.check(std::abs(td - an) <= 0.02 * an,
                    fmt("w_rep = %.4f: time domain %.5f vs analytic %.5f", w, td, an));
        }
        report(6, "classical oscillator comb w0/n and oracle agreement", v, failures);
    }

    // 7: physicality
    {
        Verdict v;
        Physicality ph;
        for (const Scan* s : {&fig2, &fig3, &fig5, &fig2_serial}) ph.add(s->out.spectrum);
        v.check(ph.worst_trace < 1e-8, fmt("max trace error %.3g over %.0f points", ph.worst_trace, double(ph.points)));
        v.check(ph.worst_eig >= -1e-6, fmt("min eigenvalue %.3g", ph.worst_eig));
        const double re = rabi_error();
        v.check(re < 1e-4, fmt("Rabi calibration error %.3g", re));
        report(7, "trace, positivity and Rabi calibration", v, failures);
    }

    // 8: determinism
    {
        Verdict v;
        const std::string a = spectrum_csv(fig2.out.spectrum);
        const std::string b = spectrum_csv(fig2_serial.out.spectrum);
        v.check(a == b, fmt("spectrum.csv with %.0f and 1 workers: %.0f bytes", double(workers), double(a.size())) +
                            (a == b ? ", identical" : ", different"));
        report(8, "worker count does not change spectrum.csv", v, failures);
    }

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
