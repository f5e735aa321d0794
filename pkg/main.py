import logging

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from src import __version__
from src.config.settings import settings
from src.routes import estimate, laws


logging.basicConfig(level=settings.log_level.upper())

app = FastAPI(title="tailfit", version=__version__)

app.include_router(estimate.router, prefix='/api')
app.include_router(laws.router, prefix='/api')

cors_origins = [
    "*"
    ]

app.add_middleware(
    CORSMiddleware,
    allow_origins=cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/")
def read_root() -> dict:
    '''
    Service banner for requests without path and parameters
    '''
    return {"message": f"tailfit {__version__} - adaptive heavy-tail estimation via FastAPI"}


if __name__ == "__main__":
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
