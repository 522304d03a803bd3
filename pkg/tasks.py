"""Developer tasks for clockforge, run with ``invoke <task>``."""
import glob
import os
import shutil

from invoke import task


# ---------------------------------------GLOBAL VARIABLES-------------------------------#
package_name = "clockforge"
docs_dir = os.path.join("docs", "source")
build_dir = os.path.join("docs", "_build")
reproduce_dir = "reproduction"


# --------------------------------------------------------------------------------------#

# ---------------------------------------HELPER FUNCTIONS-------------------------------#
def del_directory(path: str):
    """Deletes a directory

    Parameters
    ----------
    path : str
        The path to the directory

    """
    if os.path.exists(path):
        print(f"Deleting {path} directory and contents")
        shutil.rmtree(path)


def run_clockforge(c, command: str, out: str, args: str = ""):
    """Runs one clockforge command into its own output directory."""
    target = os.path.join(reproduce_dir, out)
    print(f"Running {command} into {target}")
    c.run(f"python -m {package_name} {command} {args} --out {target} --gnuplot")


# --------------------------------------------------------------------------------------#


@task(help={"fast": "Skip the long propagations marked slow"})
def test(c, fast=False):
    """
    Runs the test suite
    """
    marker = ' -m "not slow"' if fast else ""
    c.run(f"pytest{marker}")


@task
def lint(c):
    """
    Checks formatting, style and docstrings
    """
    c.run(f"black --check {package_name} tests tasks.py")
    c.run(f"flake8 {package_name}")
    c.run(f"pydocstyle {package_name}")


@task
def format(c):
    """
    Formats the code base with black
    """
    c.run(f"black {package_name} tests tasks.py")


@task
def docs(c):
    """
    Builds the html documentation
    """
    del_directory(build_dir)
    c.run(f"sphinx-build -b html {docs_dir} {os.path.join(build_dir, 'html')}")


@task(help={"clean": "Delete earlier reproduction outputs first"})
def reproduce(c, clean=False):
    """
    Regenerates every table and plot script of the gap and evolution studies
    """
    if clean:
        del_directory(reproduce_dir)
    run_clockforge(c, "gap-scan", "gap_naive", "--family naive --L 16")
    run_clockforge(c, "gap-scan", "gap_stage1", "--family stage1 --L 200")
    run_clockforge(c, "gap-scan", "gap_stage3", "--family stage3 --L 200")
    run_clockforge(c, "scaling", "scaling_eigen", "--L-list 10:24:2")
    run_clockforge(c, "scaling", "scaling_secular", "--mode secular --L-list 10:60:5")
    run_clockforge(c, "evolve", "evolve_three_stage", "--L 20")
    run_clockforge(c, "evolve", "evolve_naive", "--mode naive --L 12 --T 1000")
    for overlap in ("0.9", "0.5"):
        run_clockforge(
            c,
            "evolve",
            f"error_study_{overlap}",
            f"--error-study --initial-overlap {overlap} --L 100",
        )
    run_clockforge(c, "verify", "verify", "--random 20 --seed 7 --export-coo")
    run_clockforge(c, "ground-state", "ground_state")
    print(f"Wrote {len(glob.glob(os.path.join(reproduce_dir, '*')))} result folders")


@task
def freeze(c):
    """
    Saves the workspaces current dependencies
    """
    c.run("pip freeze > requirements-freeze.txt")
