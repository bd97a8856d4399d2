import sys
import os

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from engine.corpus import irreducibility_oracle_sweep  # reuse the corpus sweep
from engine.logger import render_report


def run_sweep(count=500, seed=None):
    summary = irreducibility_oracle_sweep(count, seed)
    sys.stdout.write(render_report(summary))
    if summary["agree"] == summary["count"]:
        print(f"✅ is_irreducible_pair agrees with enumeration on all {summary['count']} pairs.", file=sys.stderr)
        return 0
    print(f"❌ {summary['count'] - summary['agree']} disagreements out of {summary['count']}.", file=sys.stderr)
    return 1

# Run it
if __name__ == "__main__":
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else None
    sys.exit(run_sweep(count, seed))
