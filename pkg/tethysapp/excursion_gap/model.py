import datetime
import json
import uuid

from sqlalchemy import Column, DateTime, Float, Integer, Text, UniqueConstraint, create_engine, desc
from sqlalchemy.orm import declarative_base, sessionmaker

from .utilities import json_ready


# DB Engine, sessionmaker, and base
Base = declarative_base()

def init_excursion_gap_db(engine, first_time):
    """
    Initializes Database
    """

    # Create tables
    Base.metadata.create_all(engine)


def get_store_sessionmaker(url):
    """
    Gets a sessionmaker for a results store outside the portal.

    The command line records its runs here when a store URL is given. Tables are
    created on first use.
    """

    engine = create_engine(url)
    init_excursion_gap_db(engine, first_time=True)

    return sessionmaker(bind=engine)


# ---------------------- #
#   TABLE DECLARATIONS   #
# ---------------------- #

class AnalysisRun(Base):
    """
    AnalysisRun SQLAlchemy DB Model
    """

    __tablename__ = "analysis_run"

    # Columns
    id = Column(Integer, primary_key=True)
    run_id = Column(Text, unique=True)
    subcommand = Column(Text)
    seed = Column(Integer)
    config = Column(Text)
    summary = Column(Text)
    date_created = Column(DateTime)


class ResultRow(Base):
    """
    ResultRow SQLAlchemy DB Model
    """

    __tablename__ = "result_row"

    # Columns
    id = Column(Integer, primary_key=True)
    run_id = Column(Text)
    position = Column(Integer)
    gamma = Column(Float)
    payload = Column(Text)

    # Constraints
    __table_args__ = (
        UniqueConstraint("run_id", "position", name="_run_position"),
    )


def _close(session):
    engine = session.get_bind()
    session.close()
    engine.dispose()


# ------------------------ #
#   ANALYSIS RUN ACTIONS   #
# ------------------------ #

def add_analysis_run(Session, subcommand, seed, config, summary, run_id=None):
    """
    Records a new analysis run.

    The run configuration is stored as JSON. Returns the run ID, a new UUID
    unless one is given.
    """

    run_id = run_id or str(uuid.uuid4())
    session = Session()

    new_analysis_run = AnalysisRun(
        run_id=run_id,
        subcommand=subcommand,
        seed=seed,
        config=json.dumps(json_ready(config), sort_keys=True),
        summary=summary,
        date_created=datetime.datetime.now()
    )

    session.add(new_analysis_run)

    session.commit()
    _close(session)

    return run_id


def add_result_rows(Session, run_id, rows):
    """
    Stores the output rows of a run in order.
    """

    session = Session()

    session.add_all([
        ResultRow(
            run_id=run_id,
            position=position,
            gamma=row.get("gamma"),
            payload=json.dumps(json_ready(row), sort_keys=True)
        ) for position, row in enumerate(rows)
    ])

    session.commit()
    _close(session)

    return len(rows)


def get_analysis_runs(Session, subcommand=None):
    """
    Gets stored runs, newest first, optionally for one subcommand only.
    """

    session = Session()

    full_query = session.\
        query(
            AnalysisRun
        )

    if subcommand:
        full_query = full_query.filter(
            AnalysisRun.subcommand == subcommand
        )

    runs = [
        {
            "run_id": run.run_id,
            "subcommand": run.subcommand,
            "seed": run.seed,
            "config": json.loads(run.config),
            "summary": run.summary,
            "date_created": run.date_created.isoformat()
        } for run in full_query.order_by(desc(AnalysisRun.date_created), desc(AnalysisRun.id)).all()
    ]

    _close(session)

    return runs


def get_result_rows(Session, run_id):
    session = Session()

    payloads = session.\
        query(
            ResultRow.payload
        ).filter(
            ResultRow.run_id == run_id
        ).order_by(
            ResultRow.position
        ).all()

    _close(session)

    return [json.loads(payload) for payload, in payloads]


def remove_analysis_run(Session, run_id):
    """
    Removes a run and its rows. Returns the number of runs removed.
    """

    session = Session()

    session.query(ResultRow).filter(ResultRow.run_id == run_id).delete()
    removed = session.query(AnalysisRun).filter(AnalysisRun.run_id == run_id).delete()

    session.commit()
    _close(session)

    return removed
